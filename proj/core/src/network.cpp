#include "osc_ising/network.hpp"

#include "osc_ising/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace osc_ising {

void InjectionConfig::validate() const {
    if (!(amplitude >= 0.0)) throw ParameterError("injection amplitude must be non-negative");
    if (enabled && !(frequency > 0.0)) throw ParameterError("injection frequency must be positive when enabled");
}

SimConfig::Resolved SimConfig::resolve(const OscillatorParams &p, std::size_t n_nodes) const {
    p.validate();
    Resolved r{};
    r.natural_period = cycle_timing(p).period();
    r.dt = dt.value_or(r.natural_period / 500.0);
    r.event_tol = event_tol.value_or(r.dt / 1000.0);
    r.comparator_tol = comparator_tol.value_or(r.dt * 1e-6);
    r.ic_spread = ic_spread.value_or(p.alpha * p.v_sat);
    if (!(r.dt > 0.0)) throw ParameterError("dt must be positive");
    if (!(r.event_tol > 0.0 && r.event_tol < r.dt)) throw ParameterError("event_tol must lie in (0, dt)");
    if (!(r.comparator_tol > 0.0 && r.comparator_tol < r.dt)) throw ParameterError("comparator_tol must lie in (0, dt)");
    if (!(n_cycles >= 1.0)) throw ParameterError("n_cycles must be at least 1");
    if (!(r.ic_spread >= 0.0)) throw ParameterError("ic_spread must be non-negative");
    r.steps = static_cast<std::size_t>(std::ceil(n_cycles * r.natural_period / r.dt));
    if (sample_every) {
        if (*sample_every == 0) throw ParameterError("sample_every must be positive");
        r.sample_every = *sample_every;
    } else {
        const std::size_t budget = 1'000'000;
        const std::size_t values = (r.steps + 1) * std::max<std::size_t>(n_nodes, 1);
        r.sample_every = std::max<std::size_t>(1, (values + budget - 1) / budget);
    }
    return r;
}

std::vector<double> Trace::voltage_column(std::size_t osc) const {
    std::vector<double> col(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) col[i] = v[i * n + osc];
    return col;
}

std::vector<double> Trace::flip_times(std::size_t osc, FlipDirection dir) const {
    std::vector<double> out;
    for (const auto &e : flip_events)
        if (e.osc == osc && e.dir == dir) out.push_back(e.t);
    return out;
}

Eigen::MatrixXd assemble_mass_matrix(const CouplingSpec &spec, double c_l) {
    if (!(spec.c_c >= 0.0)) throw ParameterError("coupling capacitance must be non-negative");
    const auto n = static_cast<Eigen::Index>(spec.graph.node_count());
    if (!spec.shunt.empty() && spec.shunt.size() != spec.graph.node_count()) {
        throw ParameterError("shunt capacitance list does not match node count");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) * c_l;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(spec.shunt.size()); ++i) {
        if (!(spec.shunt[static_cast<std::size_t>(i)] >= 0.0)) throw ParameterError("shunt capacitance must be non-negative");
        m(i, i) += spec.shunt[static_cast<std::size_t>(i)];
    }
    for (const auto &[u, v] : spec.graph.edges()) {
        const auto a = static_cast<Eigen::Index>(u);
        const auto b = static_cast<Eigen::Index>(v);
        m(a, a) += spec.c_c;
        m(b, b) += spec.c_c;
        m(a, b) -= spec.c_c;
        m(b, a) -= spec.c_c;
    }
    return m;
}

CouplingSpec make_coupling(const Graph &graph, double c_c, const CouplingPolicy &policy) {
    if (!(c_c >= 0.0)) throw ParameterError("coupling capacitance must be non-negative");
    const auto deg = graph.degrees();
    const std::size_t d_max = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
    CouplingSpec spec{graph, c_c, {}};
    if (d_max == 0) return spec;
    if (policy.scale_by_max_degree && static_cast<double>(d_max) > policy.reference_degree) {
        spec.c_c = c_c * policy.reference_degree / static_cast<double>(d_max);
    }
    if (policy.equalize_degree) {
        const bool regular = std::all_of(deg.begin(), deg.end(), [&](std::size_t d) { return d == d_max; });
        if (!regular) {
            spec.shunt.resize(deg.size());
            for (std::size_t i = 0; i < deg.size(); ++i) spec.shunt[i] = static_cast<double>(d_max - deg[i]) * spec.c_c;
        }
    }
    return spec;
}

NetworkState random_initial_state(std::size_t n, double ic_spread, std::uint64_t seed) {
    Rng rng(seed);
    NetworkState st;
    st.v.resize(n);
    st.s.resize(n);
    for (auto &v : st.v) v = ic_spread * (2.0 * uniform_unit(rng) - 1.0);
    for (auto &s : st.s) s = (rng() >> 63) ? ComparatorState::High : ComparatorState::Low;
    return st;
}

namespace {

using Vec = Eigen::VectorXd;

class Integrator {
public:
    Integrator(const OscillatorParams &p, const CouplingSpec &spec, const InjectionConfig &inj,
               const SimConfig::Resolved &rc)
        : p_(p), inj_(inj), rc_(rc), n_(spec.graph.node_count()) {
        const Eigen::MatrixXd m = assemble_mass_matrix(spec, p.c_l);
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() != Eigen::Success) throw SimulationError("mass matrix is not positive definite");
        m_inv_ = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
        inj_dir_ = m_inv_ * Vec::Ones(static_cast<Eigen::Index>(n_));
        diagonal_ = spec.graph.edge_count() == 0 || spec.c_c == 0.0;
        diag_inv_ = m_inv_.diagonal();
        g_.resize(static_cast<Eigen::Index>(n_));
        vout_.resize(static_cast<Eigen::Index>(n_));
    }

    void set_modes(const std::vector<ComparatorState> &s, const std::vector<bool> &knee) {
        for (std::size_t i = 0; i < n_; ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            g_[k] = branch_conductance(p_, s[i], knee[i]);
            vout_[k] = output_voltage(p_, s[i]);
        }
    }

    Vec rhs(double t, const Vec &v) const {
        Vec current = g_.cwiseProduct(vout_ - v);
        Vec dv = diagonal_ ? Vec(current.cwiseProduct(diag_inv_)) : Vec(m_inv_ * current);
        if (inj_.enabled && inj_.amplitude != 0.0) {
            dv += inj_dir_ * (inj_.amplitude * std::sin(2.0 * std::numbers::pi * inj_.frequency * t));
        }
        return dv;
    }

    Vec rk4(double t, const Vec &v, double h) const {
        const Vec k1 = rhs(t, v);
        const Vec k2 = rhs(t + 0.5 * h, v + (0.5 * h) * k1);
        const Vec k3 = rhs(t + 0.5 * h, v + (0.5 * h) * k2);
        const Vec k4 = rhs(t + h, v + h * k3);
        return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

private:
    const OscillatorParams &p_;
    const InjectionConfig &inj_;
    const SimConfig::Resolved &rc_;
    std::size_t n_;
    Eigen::MatrixXd m_inv_;
    Vec inj_dir_;
    Vec diag_inv_;
    Vec g_, vout_;
    bool diagonal_ = false;
};

enum class Pending : std::uint8_t { None, Comparator, Knee };

Pending pending_event(const OscillatorParams &p, double v, ComparatorState s, bool knee) {
    if (comparator_update(v, s, p) != s) return Pending::Comparator;
    if (p.kind == DeviceKind::Eao && s == ComparatorState::Low && autaptic_active(p, v, s) != knee) return Pending::Knee;
    return Pending::None;
}

}  // namespace

Trace run(const OscillatorParams &params, const CouplingSpec &spec, const InjectionConfig &inj, const SimConfig &cfg,
          const std::optional<NetworkState> &initial) {
    inj.validate();
    const std::size_t n = spec.graph.node_count();
    if (n == 0) throw ParameterError("network needs at least one oscillator");
    const auto rc = cfg.resolve(params, n);

    NetworkState st = initial ? *initial : random_initial_state(n, rc.ic_spread, cfg.seed);
    if (st.v.size() != n || st.s.size() != n) throw ParameterError("initial state size does not match graph");

    std::vector<bool> knee(n);
    for (std::size_t i = 0; i < n; ++i) knee[i] = autaptic_active(params, st.v[i], st.s[i]);

    Integrator integ(params, spec, inj, rc);
    integ.set_modes(st.s, knee);

    Trace tr;
    tr.n = n;
    tr.natural_period = rc.natural_period;
    tr.dt = rc.dt;
    const std::size_t expected_samples = rc.steps / rc.sample_every + 1;
    tr.t.reserve(expected_samples);
    tr.v.reserve(expected_samples * n);
    tr.s.reserve(expected_samples * n);

    Vec v = Eigen::Map<const Vec>(st.v.data(), static_cast<Eigen::Index>(n));
    const double t0 = st.t;
    const double v_limit = 10.0 * params.v_sat;

    auto record = [&](double t) {
        tr.t.push_back(t);
        for (std::size_t i = 0; i < n; ++i) {
            tr.v.push_back(v[static_cast<Eigen::Index>(i)]);
            tr.s.push_back(st.s[i] == ComparatorState::High ? 1 : 0);
        }
    };

    // Comparator crossings outrank knee crossings: they set the phase readout and get the tighter tolerance.
    auto pending_in = [&](const Vec &y) {
        Pending out = Pending::None;
        for (std::size_t i = 0; i < n; ++i) {
            const Pending p = pending_event(params, y[static_cast<Eigen::Index>(i)], st.s[i], knee[i]);
            if (p == Pending::Comparator) return p;
            if (p == Pending::Knee) out = p;
        }
        return out;
    };

    record(t0);
    double t = t0;
    for (std::size_t step = 1; step <= rc.steps; ++step) {
        const double t_target = t0 + static_cast<double>(step) * rc.dt;
        // Sub-steps end either at the grid point or at a located event.
        std::size_t guard = 0;
        while (t < t_target) {
            const double h = t_target - t;
            Vec y = integ.rk4(t, v, h);
            Pending kind = pending_in(y);
            if (kind == Pending::None) {
                v = std::move(y);
                t = t_target;
                break;
            }
            double lo = 0.0, hi = h;
            Vec y_hi = std::move(y);
            while (hi - lo > (kind == Pending::Comparator ? rc.comparator_tol : rc.event_tol)) {
                const double mid = 0.5 * (lo + hi);
                Vec y_mid = integ.rk4(t, v, mid);
                if (const Pending pm = pending_in(y_mid); pm != Pending::None) {
                    hi = mid;
                    kind = pm;
                    y_hi = std::move(y_mid);
                } else {
                    lo = mid;
                }
            }
            v = std::move(y_hi);
            t = (hi == h) ? t_target : t + hi;
            // Everything triggered inside the bracket is applied at its upper end, lowest index first.
            for (std::size_t i = 0; i < n; ++i) {
                const double vi = v[static_cast<Eigen::Index>(i)];
                switch (pending_event(params, vi, st.s[i], knee[i])) {
                case Pending::Comparator: {
                    const ComparatorState next = comparator_update(vi, st.s[i], params);
                    st.s[i] = next;
                    tr.flip_events.push_back(
                        {i, t, next == ComparatorState::High ? FlipDirection::Rising : FlipDirection::Falling});
                    // The crossing happened at the threshold; judge the knee there, not at the bracket end.
                    const double v_cross = next == ComparatorState::Low ? params.upper_threshold() : vi;
                    const bool k = autaptic_active(params, v_cross, next);
                    if (next == ComparatorState::Low && params.kind == DeviceKind::Eao && k) {
                        tr.knee_events.push_back({i, t, true});
                    }
                    knee[i] = k;
                    break;
                }
                case Pending::Knee:
                    knee[i] = !knee[i];
                    tr.knee_events.push_back({i, t, knee[i]});
                    break;
                case Pending::None:
                    break;
                }
            }
            integ.set_modes(st.s, knee);
            if (++guard > 64 * (n + 1)) throw SimulationError("event cascade did not terminate");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = v[static_cast<Eigen::Index>(i)];
            if (!std::isfinite(vi) || std::abs(vi) > v_limit) {
                throw InstabilityError("voltage of oscillator " + std::to_string(i) + " reached " + std::to_string(vi) +
                                       " V at t = " + std::to_string(t) + " s; reduce dt");
            }
        }
        if (step % rc.sample_every == 0) record(t);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (tr.flip_times(i, FlipDirection::Rising).size() < 2) {
            throw NonOscillationError("oscillator " + std::to_string(i) + " did not complete a cycle");
        }
    }
    return tr;
}

std::vector<double> mean_periods(const Trace &trace, std::size_t k_cycles) {
    std::vector<double> out(trace.n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < trace.n; ++i) {
        const auto r = trace.flip_times(i, FlipDirection::Rising);
        if (r.size() < k_cycles + 1 || k_cycles == 0) continue;
        out[i] = (r.back() - r[r.size() - 1 - k_cycles]) / static_cast<double>(k_cycles);
    }
    return out;
}

void check_synchronization(const Trace &trace, std::size_t k_cycles, double rel_tol) {
    const auto periods = mean_periods(trace, k_cycles);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < periods.size(); ++i) {
        if (std::isnan(periods[i])) {
            throw SynchronizationError("oscillator " + std::to_string(i) + " has fewer than " +
                                       std::to_string(k_cycles + 1) + " rising edges");
        }
        lo = std::min(lo, periods[i]);
        hi = std::max(hi, periods[i]);
    }
    if (hi > lo * (1.0 + rel_tol)) {
        throw SynchronizationError("mean periods range from " + std::to_string(lo) + " to " + std::to_string(hi) + " s");
    }
}

void write_trace_csv(const Trace &trace, std::ostream &out) {
    out << 't';
    for (std::size_t i = 0; i < trace.n; ++i) out << ",v" << i;
    for (std::size_t i = 0; i < trace.n; ++i) out << ",s" << i;
    out << '\n';
    const auto old_precision = out.precision(10);
    for (std::size_t k = 0; k < trace.sample_count(); ++k) {
        out << trace.t[k];
        for (std::size_t i = 0; i < trace.n; ++i) out << ',' << trace.voltage(k, i);
        for (std::size_t i = 0; i < trace.n; ++i) out << ',' << static_cast<int>(trace.s[k * trace.n + i]);
        out << '\n';
    }
    out.precision(old_precision);
}

void write_events_csv(const Trace &trace, std::ostream &out) {
    out << "osc,t,dir\n";
    const auto old_precision = out.precision(12);
    for (const auto &e : trace.flip_events) out << e.osc << ',' << e.t << ',' << (e.dir == FlipDirection::Rising ? 1 : 0) << '\n';
    out.precision(old_precision);
}

}  // namespace osc_ising
