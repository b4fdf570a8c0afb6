#include "oracles.hpp"

#include "osc_ising/analysis.hpp"
#include "osc_ising/network.hpp"
#include "osc_ising/random.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace osc_ising;

namespace {

constexpr double kCc = 1e-9;
constexpr double kDeg = 180.0 / std::numbers::pi;

CouplingSpec plain(const Graph &g, double c_c = kCc) { return CouplingSpec{g, c_c, {}}; }

}  // namespace

TEST_CASE("mass matrix for small graphs") {
    const double cl = 5.3e-9;
    const Eigen::MatrixXd m2 = assemble_mass_matrix(plain(Graph::complete(2)), cl);
    Eigen::Matrix2d expect;
    expect << cl + kCc, -kCc, -kCc, cl + kCc;
    CHECK((m2 - expect).norm() < 1e-24);

    const Eigen::MatrixXd m0 = assemble_mass_matrix(plain(Graph(3, {})), cl);
    CHECK((m0 - cl * Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-24);

    const Eigen::MatrixXd m4 = assemble_mass_matrix(plain(Graph::cycle(4)), cl);
    for (int i = 0; i < 4; ++i) CHECK(m4(i, i) == doctest::Approx(cl + 2 * kCc));
    CHECK(m4(0, 2) == 0.0);
    CHECK(m4(0, 1) == doctest::Approx(-kCc));

    CouplingSpec shunted = plain(Graph::complete(2));
    shunted.shunt = {1e-9, 0.0};
    CHECK(assemble_mass_matrix(shunted, cl)(0, 0) == doctest::Approx(cl + 2e-9));
    shunted.shunt = {1e-9};
    CHECK_THROWS_AS(assemble_mass_matrix(shunted, cl), ParameterError);
    CHECK_THROWS_AS(assemble_mass_matrix(plain(Graph::cycle(4), -1.0), cl), ParameterError);
}

TEST_CASE("mass matrix is symmetric positive definite for generated graphs") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 40);
        const Graph g = gen_random(n, uniform_unit(rng), rng());
        const CouplingSpec spec = make_coupling(g, kCc, CouplingPolicy{});
        const Eigen::MatrixXd m = assemble_mass_matrix(spec, 5.3e-9);
        CHECK((m - m.transpose()).norm() == 0.0);
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("coupling policy leaves degree-two regular graphs alone and equalizes others") {
    const CouplingSpec c4 = make_coupling(Graph::cycle(4), kCc, CouplingPolicy{});
    CHECK(c4.c_c == kCc);
    CHECK(c4.shunt.empty());

    // Star on four nodes: hub degree 3, leaves degree 1.
    const Graph star(4, {{0, 1}, {0, 2}, {0, 3}});
    const CouplingSpec s = make_coupling(star, kCc, CouplingPolicy{});
    CHECK(s.c_c == doctest::Approx(kCc * 2.0 / 3.0));
    REQUIRE(s.shunt.size() == 4);
    CHECK(s.shunt[0] == 0.0);
    CHECK(s.shunt[1] == doctest::Approx(2.0 * s.c_c));
    const Eigen::MatrixXd m = assemble_mass_matrix(s, 5.3e-9);
    for (int i = 1; i < 4; ++i) CHECK(m(i, i) == doctest::Approx(m(0, 0)));

    CouplingPolicy off;
    off.scale_by_max_degree = false;
    off.equalize_degree = false;
    const CouplingSpec raw = make_coupling(star, kCc, off);
    CHECK(raw.c_c == kCc);
    CHECK(raw.shunt.empty());
}

TEST_CASE("config validation") {
    InjectionConfig inj{true, -1.0, 1000.0};
    CHECK_THROWS_AS(inj.validate(), ParameterError);
    inj = {true, 1e-5, 0.0};
    CHECK_THROWS_AS(inj.validate(), ParameterError);
    inj = {false, 0.0, 0.0};
    CHECK_NOTHROW(inj.validate());

    const auto p = OscillatorParams::conventional();
    SimConfig cfg;
    const auto r = cfg.resolve(p, 4);
    CHECK(r.dt == doctest::Approx(r.natural_period / 500.0));
    CHECK(r.event_tol == doctest::Approx(r.dt / 1000.0));
    CHECK(r.comparator_tol == doctest::Approx(r.dt * 1e-6));
    CHECK(r.ic_spread == doctest::Approx(p.alpha * p.v_sat));
    CHECK(r.sample_every == 1);
    SimConfig long_run;
    long_run.n_cycles = 5000;
    const auto big = long_run.resolve(p, 64);
    CHECK((big.steps / big.sample_every + 1) * 64 <= 1000000 + 64);
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.resolve(p, 4), ParameterError);
    cfg = SimConfig{};
    cfg.dt = 1e-6;
    cfg.event_tol = 2e-6;
    CHECK_THROWS_AS(cfg.resolve(p, 4), ParameterError);
    cfg = SimConfig{};
    cfg.n_cycles = 0.5;
    CHECK_THROWS_AS(cfg.resolve(p, 4), ParameterError);
}

TEST_CASE("initial state is seeded and bounded") {
    const NetworkState a = random_initial_state(16, 2.5, 42);
    CHECK(a.v == random_initial_state(16, 2.5, 42).v);
    CHECK(a.s == random_initial_state(16, 2.5, 42).s);
    CHECK(a.v != random_initial_state(16, 2.5, 43).v);
    for (double v : a.v) CHECK(std::abs(v) <= 2.5);
}

TEST_CASE("uncoupled identical oscillators with identical starts stay identical") {
    const auto p = OscillatorParams::eao();
    NetworkState init;
    init.v = {0.3, 0.3, 0.3};
    init.s = {ComparatorState::Low, ComparatorState::Low, ComparatorState::Low};
    SimConfig cfg;
    cfg.n_cycles = 8;
    const Trace tr = run(p, plain(Graph(3, {})), {}, cfg, init);
    for (std::size_t k = 0; k < tr.sample_count(); ++k) {
        CHECK(tr.voltage(k, 1) == tr.voltage(k, 0));
        CHECK(tr.voltage(k, 2) == tr.voltage(k, 0));
    }
}

TEST_CASE("flip events alternate and are time ordered per oscillator") {
    SimConfig cfg;
    cfg.seed = 4;
    const Trace tr = run(OscillatorParams::eao(), plain(Graph::cycle(4)), {}, cfg);
    for (std::size_t i = 0; i < tr.n; ++i) {
        double last_t = -1.0;
        std::optional<FlipDirection> last;
        for (const auto &e : tr.flip_events) {
            if (e.osc != i) continue;
            CHECK(e.t > last_t);
            if (last) CHECK(e.dir != *last);
            last_t = e.t;
            last = e.dir;
        }
    }
    for (std::size_t k = 1; k < tr.sample_count(); ++k) CHECK(tr.t[k] > tr.t[k - 1]);
}

TEST_CASE("voltages stay within the supply rails") {
    SimConfig cfg;
    cfg.seed = 8;
    const auto p = OscillatorParams::conventional();
    const Trace tr = run(p, plain(Graph::complete(5)), {}, cfg);
    for (double v : tr.v) {
        CHECK(v <= p.v_sat + 1e-9);
        CHECK(v >= -p.v_sat - 1e-9);
    }
}

TEST_CASE("capacitively coupled pair settles in anti-phase") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SimConfig cfg;
        cfg.seed = seed;
        const Trace tr = run(OscillatorParams::conventional(), plain(Graph::complete(2)), {}, cfg);
        const PhaseVector ph = extract_phases(tr, 10);
        CHECK(ph.phases[1] * kDeg == doctest::Approx(180.0).epsilon(10.0 / 180.0));
    }
}

TEST_CASE("same seed gives a bit-identical trace") {
    SimConfig cfg;
    cfg.seed = 17;
    const InjectionConfig inj{true, 2e-5, 2600.0};
    const Trace a = run(OscillatorParams::conventional(), plain(Graph::cycle(4)), inj, cfg);
    const Trace b = run(OscillatorParams::conventional(), plain(Graph::cycle(4)), inj, cfg);
    CHECK(a == b);
    cfg.seed = 18;
    CHECK_FALSE(run(OscillatorParams::conventional(), plain(Graph::cycle(4)), inj, cfg) == a);
}

TEST_CASE("uncoupled network reproduces the single-oscillator period") {
    for (const auto &p : {OscillatorParams::conventional(), OscillatorParams::eao()}) {
        const double single = simulate_single(p, SimConfig{}).period;
        SimConfig cfg;
        cfg.seed = 2;
        const Trace tr = run(p, plain(Graph(4, {}), 0.0), {}, cfg);
        for (double period : mean_periods(tr, 10)) CHECK(period == doctest::Approx(single).epsilon(0.01));
    }
}

TEST_CASE("halving the step barely moves the readout phases") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SimConfig cfg;
        cfg.seed = seed;
        const auto p = OscillatorParams::eao();
        const PhaseVector coarse = extract_phases(run(p, plain(Graph::cycle(4)), {}, cfg), 10);
        cfg.dt = cfg.resolve(p, 4).dt / 2.0;
        const PhaseVector fine = extract_phases(run(p, plain(Graph::cycle(4)), {}, cfg), 10);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(oracle::wrap_distance(coarse.phases[i], fine.phases[i]) * kDeg < 2.0);
        }
    }
}

TEST_CASE("relabeling nodes along a graph automorphism relabels the trace") {
    // Rotating C4 by one node maps the graph onto itself, so the permuted start must give the permuted run.
    const auto p = OscillatorParams::eao();
    const NetworkState init = random_initial_state(4, 2.5, 77);
    NetworkState rotated = init;
    for (std::size_t i = 0; i < 4; ++i) {
        rotated.v[(i + 1) % 4] = init.v[i];
        rotated.s[(i + 1) % 4] = init.s[i];
    }
    SimConfig cfg;
    cfg.n_cycles = 20;
    const Trace a = run(p, plain(Graph::cycle(4)), {}, cfg, init);
    const Trace b = run(p, plain(Graph::cycle(4)), {}, cfg, rotated);
    REQUIRE(a.sample_count() == b.sample_count());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.sample_count(); ++k) {
        for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a.voltage(k, i) - b.voltage(k, (i + 1) % 4)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("trace and event CSV layout") {
    SimConfig cfg;
    cfg.n_cycles = 3;
    cfg.sample_every = 50;
    const Trace tr = run(OscillatorParams::conventional(), plain(Graph::complete(2)), {}, cfg);
    std::ostringstream trace_csv, events_csv;
    write_trace_csv(tr, trace_csv);
    write_events_csv(tr, events_csv);
    std::istringstream tin(trace_csv.str()), ein(events_csv.str());
    std::string line;
    std::getline(tin, line);
    CHECK(line == "t,v0,v1,s0,s1");
    std::size_t rows = 0;
    while (std::getline(tin, line)) ++rows;
    CHECK(rows == tr.sample_count());
    std::getline(ein, line);
    CHECK(line == "osc,t,dir");
    rows = 0;
    while (std::getline(ein, line)) ++rows;
    CHECK(rows == tr.flip_events.size());
}

TEST_CASE("synchronization check") {
    const Trace locked = oracle::rising_edge_trace({0.0, 0.3e-3}, 1e-3, 20);
    CHECK_NOTHROW(check_synchronization(locked, 10));
    CHECK_THROWS_AS(check_synchronization(locked, 25), SynchronizationError);

    Trace drifting = oracle::rising_edge_trace({0.0}, 1e-3, 20);
    const Trace other = oracle::rising_edge_trace({0.0}, 1.1e-3, 20);
    drifting.n = 2;
    for (auto e : other.flip_events) {
        e.osc = 1;
        drifting.flip_events.push_back(e);
    }
    CHECK_THROWS_AS(check_synchronization(drifting, 10), SynchronizationError);
}
