#ifndef OSC_ISING_OSCILLATOR_HPP
#define OSC_ISING_OSCILLATOR_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace osc_ising {

struct SimConfig;
struct Trace;

enum class DeviceKind : std::uint8_t { Conventional, Eao };

std::string_view to_string(DeviceKind kind);
DeviceKind parse_device_kind(std::string_view text);

/// Schmitt-trigger output state. The output sits at +v_sat when High, -v_sat when Low.
enum class ComparatorState : std::uint8_t { Low = 0, High = 1 };

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Relaxation-oscillator device constants (SI units).
///
/// The comparator thresholds sit at +-alpha * v_sat. While the output is high the load
/// capacitor charges through r_f in parallel with the diode branch r_d; while low it
/// discharges through r_f, and for the autaptic device additionally through r_fet for as
/// long as the capacitor sits more than v_knee above the negative rail.
struct OscillatorParams {
    DeviceKind kind = DeviceKind::Conventional;
    double v_sat = 5.0;
    double alpha = 0.5;
    double r_f = 100e3;
    double c_l = 5.3e-9;
    double r_d = 100.0;
    double r_fet = 10e3;
    double v_knee = 3.8;

    static OscillatorParams conventional() { return OscillatorParams{}; }
    static OscillatorParams eao() {
        OscillatorParams p;
        p.kind = DeviceKind::Eao;
        return p;
    }

    /// Throws ParameterError describing the first violated constraint.
    void validate() const;

    double upper_threshold() const { return alpha * v_sat; }
    double lower_threshold() const { return -alpha * v_sat; }
};

inline double output_voltage(const OscillatorParams &p, ComparatorState s) {
    return s == ComparatorState::High ? p.v_sat : -p.v_sat;
}

/// True when the autaptic branch conducts at node voltage v.
inline bool autaptic_active(const OscillatorParams &p, double v, ComparatorState s) {
    return p.kind == DeviceKind::Eao && s == ComparatorState::Low && (v + p.v_sat) > p.v_knee;
}

/// Conductance of the feedback network between the comparator output and the load node.
/// The drive current into the node is G * (output_voltage(s) - v).
double branch_conductance(const OscillatorParams &p, double v, ComparatorState s);

/// Same as branch_conductance with the autaptic branch state supplied explicitly, which is
/// how the integrator holds it piecewise constant between knee events.
double branch_conductance(const OscillatorParams &p, ComparatorState s, bool autaptic_on);

/// Hysteresis update: High flips at v >= +alpha*v_sat, Low flips at v <= -alpha*v_sat.
ComparatorState comparator_update(double v, ComparatorState s, const OscillatorParams &p);

double tau_charge(const OscillatorParams &p);  // (r_f || r_d) c_l
double tau_fast(const OscillatorParams &p);    // (r_f || r_fet) c_l
double tau_slow(const OscillatorParams &p);    // r_f c_l

/// Closed-form timing of an isolated oscillator's limit cycle.
struct CycleTiming {
    double rise = 0.0;           // charging, -alpha*v_sat -> +alpha*v_sat
    double fast_discharge = 0.0; // t_A: autaptic branch on
    double slow_discharge = 0.0; // remainder of the discharge
    double period() const { return rise + fast_discharge + slow_discharge; }
    double frequency() const { return 1.0 / period(); }
};

CycleTiming cycle_timing(const OscillatorParams &p);

class NonOscillationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Measurements taken from the steady-state part of an isolated-oscillator run.
struct SingleOscillatorReport {
    double period = 0.0;
    double rise_time = 0.0;
    double fall_time = 0.0;
    double rise_fraction = 0.0;
    double t_a = 0.0;  // fast-discharge duration; 0 for conventional devices
    double t_a_over_t = 0.0;
    /// Log-linear fits of v + v_sat against time inside each discharge segment.
    double fitted_tau_fast = std::numeric_limits<double>::quiet_NaN();
    double fitted_tau_slow = std::numeric_limits<double>::quiet_NaN();
    std::size_t cycles_measured = 0;
};

/// Runs one uncoupled oscillator and measures its limit cycle. Throws NonOscillationError
/// if fewer than three full cycles are observed.
SingleOscillatorReport simulate_single(const OscillatorParams &p, const SimConfig &cfg, Trace *trace_out = nullptr);

}  // namespace osc_ising

#endif  // OSC_ISING_OSCILLATOR_HPP
