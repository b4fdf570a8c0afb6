#ifndef OSC_ISING_NETWORK_HPP
#define OSC_ISING_NETWORK_HPP

#include "osc_ising/graph.hpp"
#include "osc_ising/oscillator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

namespace osc_ising {

/// One coupling capacitor of value c_c per graph edge, attached between load nodes.
/// `shunt` optionally adds grounded capacitance per node (empty means none).
struct CouplingSpec {
    Graph graph;
    double c_c = 1e-9;
    std::vector<double> shunt;
};

/// How per-edge coupling is sized for graphs that are not regular.
struct CouplingPolicy {
    /// Scale c_c by min(1, reference_degree / max_degree) so the total coupling seen by the
    /// best-connected node stays that of a reference_degree node.
    bool scale_by_max_degree = true;
    double reference_degree = 2.0;
    /// Pad every node with (max_degree - degree) * c_c to ground so all nodes carry the same
    /// self-capacitance and therefore the same free-running frequency.
    bool equalize_degree = true;
};

/// Coupling for `graph` with nominal per-edge capacitance c_c under the policy.
/// Regular graphs with max degree <= reference_degree are returned unchanged.
CouplingSpec make_coupling(const Graph &graph, double c_c, const CouplingPolicy &policy);

/// Sinusoidal current amplitude * sin(2 pi frequency t) added to every node.
struct InjectionConfig {
    bool enabled = false;
    double amplitude = 0.0;
    double frequency = 0.0;

    void validate() const;
};

/// Integration settings. Fields left unset resolve against the device defaults in resolve().
struct SimConfig {
    std::optional<double> dt;          // default: natural period / 500
    double n_cycles = 50.0;            // run length in natural periods
    std::optional<double> event_tol;   // knee crossings; default: dt / 1000
    std::optional<double> comparator_tol;  // comparator crossings; default: dt * 1e-6
    std::uint64_t seed = 1;
    std::optional<double> ic_spread;   // default: alpha * v_sat
    std::optional<std::size_t> sample_every;  // default keeps traces under ~1e6 samples

    struct Resolved {
        double dt;
        double event_tol;
        double comparator_tol;
        double ic_spread;
        std::size_t sample_every;
        std::size_t steps;
        double natural_period;
    };

    /// Fills defaults and validates; throws ParameterError.
    Resolved resolve(const OscillatorParams &p, std::size_t n_nodes) const;
};

enum class FlipDirection : std::uint8_t { Falling = 0, Rising = 1 };

/// A comparator transition. Rising means Low -> High (start of the charging phase).
struct FlipEvent {
    std::size_t osc;
    double t;
    FlipDirection dir;

    bool operator==(const FlipEvent &) const = default;
};

/// Autaptic branch switching on (on = true) or off.
struct KneeEvent {
    std::size_t osc;
    double t;
    bool on;

    bool operator==(const KneeEvent &) const = default;
};

struct NetworkState {
    std::vector<double> v;
    std::vector<ComparatorState> s;
    double t = 0.0;
};

/// Decimated time series of a network run plus every comparator and knee event.
struct Trace {
    std::size_t n = 0;
    std::vector<double> t;
    std::vector<double> v;             // row-major, t.size() x n
    std::vector<std::uint8_t> s;       // row-major, 1 = High
    std::vector<FlipEvent> flip_events;
    std::vector<KneeEvent> knee_events;
    double natural_period = 0.0;
    double dt = 0.0;

    std::size_t sample_count() const { return t.size(); }
    double voltage(std::size_t sample, std::size_t osc) const { return v[sample * n + osc]; }
    std::vector<double> voltage_column(std::size_t osc) const;
    std::vector<double> flip_times(std::size_t osc, FlipDirection dir) const;

    bool operator==(const Trace &) const = default;
};

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InstabilityError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class SynchronizationError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// M_ii = C_L + shunt_i + sum_j C_c, M_ij = -C_c on edges.
Eigen::MatrixXd assemble_mass_matrix(const CouplingSpec &spec, double c_l);

/// Seeded random initial state: v uniform in [-ic_spread, ic_spread], comparator states fair coin flips.
NetworkState random_initial_state(std::size_t n, double ic_spread, std::uint64_t seed);

/// Integrates M dv/dt = G(v, s) (V_out(s) - v) + i_inj(t) with fixed-step RK4, locating
/// comparator and knee crossings by bisection of the step. Throws NonOscillationError when
/// some oscillator never completes a cycle, InstabilityError on voltage blow-up.
Trace run(const OscillatorParams &params, const CouplingSpec &spec, const InjectionConfig &inj,
          const SimConfig &cfg, const std::optional<NetworkState> &initial = std::nullopt);

/// Mean Rising-to-Rising period of each oscillator over its last k_cycles cycles.
std::vector<double> mean_periods(const Trace &trace, std::size_t k_cycles);

/// Throws SynchronizationError unless every oscillator has k_cycles complete cycles at the
/// end of the trace and all mean periods agree within rel_tol.
void check_synchronization(const Trace &trace, std::size_t k_cycles, double rel_tol = 0.02);

void write_trace_csv(const Trace &trace, std::ostream &out);
void write_events_csv(const Trace &trace, std::ostream &out);

}  // namespace osc_ising

#endif  // OSC_ISING_NETWORK_HPP
