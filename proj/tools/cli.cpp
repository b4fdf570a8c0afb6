#include "cli.hpp"

#include "osc_ising/analysis.hpp"
#include "osc_ising/config.hpp"
#include "osc_ising/experiment.hpp"
#include "osc_ising/graph.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace osc_ising::cli {

namespace {

struct GenOptions {
    std::size_t n = 0;
    double eta = 0.0;
    std::uint64_t seed = 1;
    std::string out;
};

struct OracleOptions {
    std::string graph;
};

struct SolveOptions {
    std::string machine = "eao";
    std::string graph;
    std::uint64_t seed = 1;
    std::string config;
    std::vector<std::string> overrides;
    std::string trace;
    std::string events;
};

struct SpectrumOptions {
    std::string out;
    std::vector<double> grid;
    double period = 1e-3;
    std::optional<double> tau1;
    std::optional<double> tau2;
    std::size_t n_periods = 32;
    std::size_t samples_per_period = 256;
};

struct BenchOptions {
    std::string config;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> threads;
};

std::ofstream open_output(const std::filesystem::path &path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return f;
}

int do_gen(const GenOptions &o, std::ostream &out) {
    const Graph g = gen_random(o.n, o.eta, o.seed);
    if (o.out.empty()) {
        out << format_graph(g);
    } else {
        save_graph(g, o.out);
        out << "wrote " << o.out << " (" << g.node_count() << " nodes, " << g.edge_count() << " edges)\n";
    }
    return kExitOk;
}

void print_spins(const SpinAssignment &a, std::ostream &out) {
    for (std::size_t i = 0; i < a.size(); ++i) out << (i ? " " : "") << (a[i] > 0 ? '+' : '-');
    out << '\n';
}

int do_oracle(const OracleOptions &o, std::ostream &out) {
    const Graph g = load_graph(o.graph);
    const CutResult r = brute_force_maxcut(g);
    out << "maxcut " << r.cut << '\n';
    out << "ising_energy " << r.ising_energy << '\n';
    out << "spins ";
    print_spins(r.spins, out);
    return kExitOk;
}

int do_solve(const SolveOptions &o, std::ostream &out) {
    Config cfg = o.config.empty() ? Config{} : Config::load(o.config);
    for (const auto &kv : o.overrides) cfg.set_assignment(kv);
    cfg.set("graph_file", o.graph);
    cfg.set("machines", o.machine);
    cfg.set("trial_seed_base", std::to_string(o.seed));
    ExperimentSpec spec = experiment_from_config(cfg);
    const GraphInstance &g = spec.graphs.front();
    const Machine m = spec.machines.front();

    const double f_inj = m == Machine::ConventionalShil ? shil_frequency_for(spec, g) : 0.0;
    std::optional<std::size_t> optimum;
    if (g.graph.node_count() <= kMaxBruteForceNodes) optimum = brute_force_maxcut(g.graph).cut;

    Trace trace;
    const TrialResult r = run_trial(spec, g, m, 0, f_inj, optimum, &trace);

    out << "machine " << to_string(m) << '\n';
    out << "graph " << g.id << " (" << g.graph.node_count() << " nodes, " << g.graph.edge_count() << " edges)\n";
    if (m == Machine::ConventionalShil) out << "f_inj_hz " << std::setprecision(6) << f_inj << '\n';
    out << "synchronized " << (r.synchronized ? 1 : 0) << '\n';
    if (!r.synchronized) {
        out << "readout none: " << r.failure << '\n';
    } else {
        out << "cut " << *r.cut << '\n';
        if (optimum) out << "optimum " << *optimum << '\n';
        out << "residual_deg " << std::fixed << std::setprecision(3) << r.residual_deg << '\n';
        out << "bipartite " << (r.bipartite(spec.bipartition_threshold_deg) ? 1 : 0) << '\n';
        out << "phases_deg";
        for (double ph : r.phases) out << ' ' << std::setprecision(2) << ph * 180.0 / std::numbers::pi;
        out << '\n';
        PhaseVector pv{r.phases, 0.0};
        out << "spins ";
        print_spins(phases_to_spins(pv), out);
    }
    if (!o.trace.empty() && trace.n) {
        auto f = open_output(o.trace);
        write_trace_csv(trace, f);
    }
    if (!o.events.empty() && trace.n) {
        auto f = open_output(o.events);
        write_events_csv(trace, f);
    }
    if (!r.failure.empty() && trace.n == 0) throw std::runtime_error(r.failure);
    return kExitOk;
}

int do_spectrum(const SpectrumOptions &o, std::ostream &out) {
    SweepConfig cfg = SweepConfig::defaults();
    cfg.period = o.period;
    cfg.n_periods = o.n_periods;
    cfg.samples_per_period = o.samples_per_period;
    if (!o.grid.empty()) cfg.tA_over_T = o.grid;
    TauPair taus = SweepConfig::default_taus(o.period);
    if (o.tau1) taus.tau1 = *o.tau1;
    if (o.tau2) taus.tau2 = *o.tau2;
    cfg.taus = {taus};
    const auto rows = sweep_harmonic_ratio(cfg);
    if (o.out.empty()) {
        write_sweep_csv(rows, out);
    } else {
        auto f = open_output(o.out);
        write_sweep_csv(rows, f);
        out << "wrote " << o.out << " (" << rows.size() << " rows)\n";
    }
    return kExitOk;
}

int do_bench(const BenchOptions &o, std::ostream &out, std::ostream &err) {
    Config cfg = Config::load(o.config);
    for (const auto &kv : o.overrides) cfg.set_assignment(kv);
    if (o.trials) cfg.set("trials", std::to_string(*o.trials));
    if (o.threads) cfg.set("threads", std::to_string(*o.threads));
    if (!o.out_dir.empty()) cfg.set("out_dir", o.out_dir);
    const ExperimentSpec spec = experiment_from_config(cfg);
    const std::filesystem::path dir = cfg.get_string("out_dir").value_or(".");
    std::filesystem::create_directories(dir);

    const auto results = run_experiment(spec);
    {
        auto f = open_output(dir / "bench.csv");
        write_bench_csv(results, f);
    }
    const Comparison cmp = compare_machines(results);
    for (const auto &w : cmp.warnings) err << "warning: " << w << '\n';
    {
        auto f = open_output(dir / "compare.csv");
        write_compare_csv(cmp, f);
    }

    std::size_t synced = 0;
    for (const auto &r : results) synced += r.synchronized ? 1 : 0;
    out << "trials " << results.size() << " (synchronized " << synced << ")\n";
    out << "graphs compared " << cmp.rows.size() << '\n';
    if (cmp.mean_deviation_pct) {
        out << "mean_deviation_pct " << std::fixed << std::setprecision(3) << *cmp.mean_deviation_pct << '\n';
    }
    out << "wrote " << (dir / "bench.csv").string() << " and " << (dir / "compare.csv").string() << '\n';
    return kExitOk;
}

}  // namespace

int cli_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Oscillator Ising machine simulator for MaxCut", "osc_ising"};
    app.require_subcommand(1);

    GenOptions gen;
    auto *gen_cmd = app.add_subcommand("gen", "Write a random graph with an exact edge density");
    gen_cmd->add_option("--n", gen.n, "Node count")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    gen_cmd->add_option("--eta", gen.eta, "Edge density in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--out", gen.out, "Output file (stdout when omitted)");

    OracleOptions oracle;
    auto *oracle_cmd = app.add_subcommand("oracle", "Exact MaxCut by enumeration (n <= 24)");
    oracle_cmd->add_option("graph", oracle.graph, "Graph file")->required();

    SolveOptions solve;
    auto *solve_cmd = app.add_subcommand("solve", "Simulate one machine on one graph and read out the cut");
    solve_cmd->add_option("--machine", solve.machine, "eao | conventional | shil")
        ->check(CLI::IsMember({"eao", "conventional", "conv", "shil"}));
    solve_cmd->add_option("--graph", solve.graph, "Graph file")->required();
    solve_cmd->add_option("--seed", solve.seed, "Initial-condition seed");
    solve_cmd->add_option("--config", solve.config, "Config file (key = value)");
    solve_cmd->add_option("--set", solve.overrides, "Override a config key, key=value")->take_all();
    solve_cmd->add_option("--trace", solve.trace, "Write the voltage trace CSV here");
    solve_cmd->add_option("--events", solve.events, "Write comparator flip events CSV here");

    SpectrumOptions spectrum;
    auto *spectrum_cmd = app.add_subcommand("spectrum", "Second-harmonic ratio sweep over t_A/T");
    spectrum_cmd->add_option("--out", spectrum.out, "Output CSV (stdout when omitted)");
    spectrum_cmd->add_option("--grid", spectrum.grid, "t_A/T values")->delimiter(',');
    spectrum_cmd->add_option("--period", spectrum.period, "Waveform period in seconds")->check(CLI::PositiveNumber);
    spectrum_cmd->add_option("--tau1", spectrum.tau1, "Fast time constant in seconds")->check(CLI::PositiveNumber);
    spectrum_cmd->add_option("--tau2", spectrum.tau2, "Slow time constant in seconds")->check(CLI::PositiveNumber);
    spectrum_cmd->add_option("--periods", spectrum.n_periods, "Periods per waveform")->check(CLI::Range(16, 1 << 16));
    spectrum_cmd->add_option("--samples-per-period", spectrum.samples_per_period, "Sampling density")
        ->check(CLI::Range(8, 1 << 16));

    BenchOptions bench;
    auto *bench_cmd = app.add_subcommand("bench", "Run a batch experiment; writes bench.csv and compare.csv");
    bench_cmd->add_option("--config", bench.config, "Experiment config file")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--out-dir", bench.out_dir, "Output directory (config key out_dir)");
    bench_cmd->add_option("--trials", bench.trials, "Trials per graph and machine");
    bench_cmd->add_option("--threads", bench.threads, "Worker threads");
    bench_cmd->add_option("--set", bench.overrides, "Override a config key, key=value")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        err << app.help();
        return kExitUsage;
    }

    try {
        if (*gen_cmd) return do_gen(gen, out);
        if (*oracle_cmd) return do_oracle(oracle, out);
        if (*solve_cmd) return do_solve(solve, out);
        if (*spectrum_cmd) return do_spectrum(spectrum, out);
        if (*bench_cmd) return do_bench(bench, out, err);
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace osc_ising::cli
