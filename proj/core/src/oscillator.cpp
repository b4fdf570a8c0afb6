#include "osc_ising/oscillator.hpp"

#include "osc_ising/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace osc_ising {

std::string_view to_string(DeviceKind kind) {
    return kind == DeviceKind::Eao ? "eao" : "conventional";
}

DeviceKind parse_device_kind(std::string_view text) {
    if (text == "eao" || text == "EAO") return DeviceKind::Eao;
    if (text == "conventional" || text == "conv") return DeviceKind::Conventional;
    throw ParameterError("unknown device kind '" + std::string(text) + "'");
}

void OscillatorParams::validate() const {
    auto positive = [](double x, const char *name) {
        if (!(x > 0.0) || std::isnan(x)) throw ParameterError(std::string(name) + " must be positive");
    };
    positive(v_sat, "v_sat");
    positive(r_f, "r_f");
    positive(c_l, "c_l");
    positive(r_d, "r_d");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    if (!(r_d < r_f)) throw ParameterError("r_d must be smaller than r_f (fast charging branch)");
    if (kind == DeviceKind::Eao) {
        positive(r_fet, "r_fet");
        positive(v_knee, "v_knee");
    }
}

double branch_conductance(const OscillatorParams &p, ComparatorState s, bool autaptic_on) {
    if (s == ComparatorState::High) return 1.0 / p.r_f + 1.0 / p.r_d;
    if (p.kind == DeviceKind::Eao && autaptic_on) return 1.0 / p.r_f + 1.0 / p.r_fet;
    return 1.0 / p.r_f;
}

double branch_conductance(const OscillatorParams &p, double v, ComparatorState s) {
    return branch_conductance(p, s, autaptic_active(p, v, s));
}

ComparatorState comparator_update(double v, ComparatorState s, const OscillatorParams &p) {
    if (s == ComparatorState::High && v >= p.upper_threshold()) return ComparatorState::Low;
    if (s == ComparatorState::Low && v <= p.lower_threshold()) return ComparatorState::High;
    return s;
}

double tau_charge(const OscillatorParams &p) { return p.c_l / (1.0 / p.r_f + 1.0 / p.r_d); }
double tau_fast(const OscillatorParams &p) { return p.c_l / (1.0 / p.r_f + 1.0 / p.r_fet); }
double tau_slow(const OscillatorParams &p) { return p.r_f * p.c_l; }

CycleTiming cycle_timing(const OscillatorParams &p) {
    p.validate();
    CycleTiming timing;
    // Distances to the target rail at the start and end of each phase.
    const double far = (1.0 + p.alpha) * p.v_sat;
    const double near = (1.0 - p.alpha) * p.v_sat;
    timing.rise = tau_charge(p) * std::log(far / near);

    if (p.kind == DeviceKind::Conventional || p.v_knee >= far) {
        timing.slow_discharge = tau_slow(p) * std::log(far / near);
    } else if (p.v_knee <= near) {
        timing.fast_discharge = tau_fast(p) * std::log(far / near);
    } else {
        timing.fast_discharge = tau_fast(p) * std::log(far / p.v_knee);
        timing.slow_discharge = tau_slow(p) * std::log(p.v_knee / near);
    }
    return timing;
}

namespace {

// Least-squares slope of log(v + v_sat) against t over samples strictly inside (t0, t1).
std::optional<double> fit_decay(const Trace &tr, double v_sat, double t0, double t1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    const auto begin = std::upper_bound(tr.t.begin(), tr.t.end(), t0);
    for (auto it = begin; it != tr.t.end() && *it < t1; ++it) {
        const auto idx = static_cast<std::size_t>(it - tr.t.begin());
        const double x = *it - t0;
        const double y = std::log(tr.voltage(idx, 0) + v_sat);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 3) return std::nullopt;
    const double nn = static_cast<double>(count);
    const double denom = nn * sxx - sx * sx;
    if (denom <= 0) return std::nullopt;
    const double slope = (nn * sxy - sx * sy) / denom;
    if (!(slope < 0)) return std::nullopt;
    return -1.0 / slope;
}

}  // namespace

SingleOscillatorReport simulate_single(const OscillatorParams &p, const SimConfig &cfg, Trace *trace_out) {
    p.validate();
    SimConfig local = cfg;
    local.sample_every = 1;
    CouplingSpec spec{Graph(1, {}), 0.0, {}};
    Trace tr = run(p, spec, InjectionConfig{}, local);

    const auto rising = tr.flip_times(0, FlipDirection::Rising);
    if (rising.size() < 5) {
        throw NonOscillationError("oscillator completed only " + std::to_string(rising.size()) + " cycles");
    }

    SingleOscillatorReport rep;
    // Skip the first two cycles as transient.
    std::vector<double> periods, rises, fast_times, fast_taus, slow_taus;
    for (std::size_t k = 2; k + 1 < rising.size(); ++k) {
        const double start = rising[k];
        const double end = rising[k + 1];
        periods.push_back(end - start);

        auto fall_it = std::find_if(tr.flip_events.begin(), tr.flip_events.end(), [&](const FlipEvent &e) {
            return e.dir == FlipDirection::Falling && e.t > start && e.t < end;
        });
        if (fall_it == tr.flip_events.end()) continue;
        const double fall = fall_it->t;
        rises.push_back(fall - start);

        double knee_off = fall;
        if (p.kind == DeviceKind::Eao) {
            auto knee_it = std::find_if(tr.knee_events.begin(), tr.knee_events.end(),
                                        [&](const KneeEvent &e) { return !e.on && e.t > fall && e.t < end; });
            if (knee_it != tr.knee_events.end()) {
                knee_off = knee_it->t;
            } else if (autaptic_active(p, p.upper_threshold(), ComparatorState::Low)) {
                knee_off = end;  // branch never released before the lower threshold
            }
            fast_times.push_back(knee_off - fall);
            if (knee_off > fall) {
                if (auto tau = fit_decay(tr, p.v_sat, fall, knee_off)) fast_taus.push_back(*tau);
            }
        }
        if (end > knee_off) {
            if (auto tau = fit_decay(tr, p.v_sat, knee_off, end)) slow_taus.push_back(*tau);
        }
    }

    auto mean = [](const std::vector<double> &xs) {
        if (xs.empty()) return 0.0;
        double s = 0;
        for (double x : xs) s += x;
        return s / static_cast<double>(xs.size());
    };

    rep.cycles_measured = periods.size();
    rep.period = mean(periods);
    rep.rise_time = mean(rises);
    rep.fall_time = rep.period - rep.rise_time;
    rep.rise_fraction = rep.rise_time / rep.period;
    rep.t_a = mean(fast_times);
    rep.t_a_over_t = rep.t_a / rep.period;
    if (!fast_taus.empty()) rep.fitted_tau_fast = mean(fast_taus);
    if (!slow_taus.empty()) rep.fitted_tau_slow = mean(slow_taus);

    if (trace_out) *trace_out = std::move(tr);
    return rep;
}

}  // namespace osc_ising
