#include "osc_ising/experiment.hpp"

#include "osc_ising/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace osc_ising {

std::string_view to_string(Machine m) {
    switch (m) {
    case Machine::EaoNoInjection: return "eao";
    case Machine::ConventionalNoInjection: return "conventional";
    case Machine::ConventionalShil: return "shil";
    }
    return "?";
}

Machine parse_machine(std::string_view text) {
    if (text == "eao" || text == "EAO_no_injection") return Machine::EaoNoInjection;
    if (text == "conventional" || text == "conv" || text == "Conventional_no_injection") {
        return Machine::ConventionalNoInjection;
    }
    if (text == "shil" || text == "Conventional_SHIL") return Machine::ConventionalShil;
    throw ConfigError("unknown machine '" + std::string(text) + "' (expected eao, conventional or shil)");
}

GraphInstance generated_instance(std::size_t n, double eta, std::uint64_t graph_seed) {
    std::ostringstream id;
    id << 'n' << n << "_eta" << std::fixed << std::setprecision(2) << eta << "_s" << graph_seed;
    Graph g = gen_random(n, eta, graph_seed);
    return {id.str(), std::move(g), eta};
}

GraphInstance file_instance(const std::string &path) {
    Graph g = load_graph(path);
    const double eta = g.density();
    return {std::filesystem::path(path).stem().string(), std::move(g), eta};
}

OscillatorParams ExperimentSpec::params_for(Machine m) const {
    OscillatorParams p = device;
    p.kind = m == Machine::EaoNoInjection ? DeviceKind::Eao : DeviceKind::Conventional;
    return p;
}

InjectionConfig ExperimentSpec::injection_for(Machine m, double shil_frequency_hz, const Graph &g) const {
    if (m != Machine::ConventionalShil) return {};
    double amplitude = shil_amplitude;
    if (shil_follows_coupling && c_c > 0.0) amplitude *= coupling_for(g).c_c / c_c;
    return InjectionConfig{true, amplitude, shil_frequency_hz};
}

void ExperimentSpec::validate() const {
    if (machines.empty()) throw ConfigError("experiment needs at least one machine");
    if (graphs.empty()) throw ConfigError("experiment needs at least one graph");
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (!(c_c >= 0.0)) throw ConfigError("c_c must be non-negative");
    if (!(shil_amplitude >= 0.0)) throw ConfigError("shil_amplitude must be non-negative");
    if (shil_frequency && !(*shil_frequency > 0.0)) throw ConfigError("shil_frequency must be positive");
    if (readout_cycles < 1) throw ConfigError("readout_cycles must be at least 1");
    for (Machine m : machines) params_for(m).validate();
    sim.resolve(params_for(machines.front()), graphs.front().graph.node_count());
}

std::uint64_t trial_seed(std::uint64_t base, std::string_view graph_id, std::size_t trial) {
    // FNV-1a over the id keeps the seed independent of where the graph sits in the batch.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : graph_id) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return combine_seeds(combine_seeds(base, h), static_cast<std::uint64_t>(trial));
}

double free_running_period(const ExperimentSpec &spec, const GraphInstance &g) {
    const OscillatorParams p = spec.params_for(Machine::ConventionalNoInjection);
    SimConfig cfg = spec.sim;
    cfg.seed = trial_seed(0x5eed'ca1bULL, g.id, 0);
    const Trace tr = run(p, spec.coupling_for(g.graph), InjectionConfig{}, cfg);
    auto periods = mean_periods(tr, spec.readout_cycles);
    std::erase_if(periods, [](double x) { return std::isnan(x); });
    if (periods.empty()) return cycle_timing(p).period();
    std::sort(periods.begin(), periods.end());
    const std::size_t mid = periods.size() / 2;
    return periods.size() % 2 ? periods[mid] : 0.5 * (periods[mid - 1] + periods[mid]);
}

double shil_frequency_for(const ExperimentSpec &spec, const GraphInstance &g) {
    if (spec.shil_frequency) return *spec.shil_frequency;
    return 2.0 / free_running_period(spec, g);
}

TrialResult run_trial(const ExperimentSpec &spec, const GraphInstance &g, Machine m, std::size_t trial,
                      double shil_frequency_hz, std::optional<std::size_t> optimum, Trace *trace_out) {
    TrialResult r;
    r.graph_id = g.id;
    r.n = g.graph.node_count();
    r.eta = g.eta;
    r.machine = m;
    r.trial = trial;
    r.optimum = optimum;

    const auto start = std::chrono::steady_clock::now();
    try {
        SimConfig cfg = spec.sim;
        cfg.seed = trial_seed(spec.trial_seed_base, g.id, trial);
        Trace tr = run(spec.params_for(m), spec.coupling_for(g.graph), spec.injection_for(m, shil_frequency_hz, g.graph), cfg);
        try {
            const PhaseVector phases = extract_phases(tr, spec.readout_cycles, spec.sync_tol);
            const CutResult cut = readout_cut(g.graph, phases);
            r.cut = cut.cut;
            r.residual_deg = cut.residual_deg;
            r.synchronized = true;
            r.phases = phases.phases;
        } catch (const SynchronizationError &e) {
            r.failure = e.what();
        }
        if (trace_out) *trace_out = std::move(tr);
    } catch (const std::exception &e) {
        r.failure = e.what();
    }
    if (spec.record_runtime) {
        r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return r;
}

std::size_t resolve_thread_count(std::size_t requested) {
    std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("OSC_ISING_THREADS")) {
        char *end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
    }
    return std::max<std::size_t>(n, 1);
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn &&fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
    };
    const std::size_t workers = std::min(threads, count);
    if (workers <= 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
}

}  // namespace

std::vector<TrialResult> run_experiment(const ExperimentSpec &spec) {
    spec.validate();
    const std::size_t threads = resolve_thread_count(spec.threads);
    const bool need_shil = std::find(spec.machines.begin(), spec.machines.end(), Machine::ConventionalShil) !=
                           spec.machines.end();

    struct GraphPrep {
        std::optional<std::size_t> optimum;
        double shil_hz = 0.0;
    };
    std::vector<GraphPrep> prep(spec.graphs.size());
    parallel_for(spec.graphs.size(), threads, [&](std::size_t gi) {
        const auto &g = spec.graphs[gi];
        if (spec.run_oracle && g.graph.node_count() <= kMaxBruteForceNodes) {
            prep[gi].optimum = brute_force_maxcut(g.graph).cut;
        }
        if (need_shil) {
            try {
                prep[gi].shil_hz = shil_frequency_for(spec, g);
            } catch (const std::exception &) {
                prep[gi].shil_hz = 2.0 * cycle_timing(spec.params_for(Machine::ConventionalShil)).frequency();
            }
        }
    });

    struct Job {
        std::size_t graph;
        Machine machine;
        std::size_t trial;
    };
    std::vector<Job> jobs;
    for (std::size_t gi = 0; gi < spec.graphs.size(); ++gi)
        for (Machine m : spec.machines)
            for (std::size_t t = 0; t < spec.trials; ++t) jobs.push_back({gi, m, t});

    std::vector<TrialResult> results(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        const Job &job = jobs[j];
        results[j] = run_trial(spec, spec.graphs[job.graph], job.machine, job.trial, prep[job.graph].shil_hz,
                               prep[job.graph].optimum);
    });

    std::stable_sort(results.begin(), results.end(), [](const TrialResult &a, const TrialResult &b) {
        if (a.graph_id != b.graph_id) return a.graph_id < b.graph_id;
        if (a.machine != b.machine) return a.machine < b.machine;
        return a.trial < b.trial;
    });
    return results;
}

double deviation_pct(double cut_eao, double cut_shil) { return 100.0 * (cut_eao - cut_shil) / cut_shil; }

Comparison compare_machines(const std::vector<TrialResult> &results) {
    struct Acc {
        std::size_t n = 0;
        double eta = 0.0;
        std::optional<std::size_t> optimum;
        std::optional<std::size_t> best[2];
        double sum[2] = {0, 0};
        std::size_t count[2] = {0, 0};
        bool present[2] = {false, false};
    };
    std::vector<std::string> order;
    std::map<std::string, Acc> by_graph;
    for (const auto &r : results) {
        int side;
        if (r.machine == Machine::EaoNoInjection) side = 0;
        else if (r.machine == Machine::ConventionalShil) side = 1;
        else continue;
        auto [it, inserted] = by_graph.try_emplace(r.graph_id);
        if (inserted) order.push_back(r.graph_id);
        Acc &acc = it->second;
        acc.n = r.n;
        acc.eta = r.eta;
        if (r.optimum) acc.optimum = r.optimum;
        acc.present[side] = true;
        if (!r.synchronized || !r.cut) continue;
        acc.best[side] = std::max(acc.best[side].value_or(0), *r.cut);
        acc.sum[side] += static_cast<double>(*r.cut);
        ++acc.count[side];
    }

    Comparison cmp;
    double dev_sum = 0.0;
    std::size_t dev_count = 0;
    for (const auto &id : order) {
        const Acc &acc = by_graph.at(id);
        if (!acc.present[0] || !acc.present[1]) {
            cmp.warnings.push_back("graph " + id + ": both eao and shil results are needed; skipped");
            continue;
        }
        ComparisonRow row;
        row.graph_id = id;
        row.n = acc.n;
        row.eta = acc.eta;
        row.optimum = acc.optimum;
        row.best_eao = acc.best[0];
        row.best_shil = acc.best[1];
        row.mean_eao = acc.count[0] ? acc.sum[0] / static_cast<double>(acc.count[0]) : 0.0;
        row.mean_shil = acc.count[1] ? acc.sum[1] / static_cast<double>(acc.count[1]) : 0.0;
        if (row.best_eao && row.best_shil && *row.best_shil > 0) {
            row.deviation_pct = deviation_pct(static_cast<double>(*row.best_eao), static_cast<double>(*row.best_shil));
            dev_sum += *row.deviation_pct;
            ++dev_count;
        } else {
            cmp.warnings.push_back("graph " + id + ": no synchronized trials for one machine; deviation undefined");
        }
        cmp.rows.push_back(std::move(row));
    }
    if (dev_count) cmp.mean_deviation_pct = dev_sum / static_cast<double>(dev_count);
    return cmp;
}

void write_bench_csv(const std::vector<TrialResult> &results, std::ostream &out) {
    out << "graph_id,n,eta,machine,trial,cut,optimum,residual_deg,synchronized,runtime_ms\n";
    for (const auto &r : results) {
        std::ostringstream line;
        line << r.graph_id << ',' << r.n << ',' << std::fixed << std::setprecision(4) << r.eta << ',' << to_string(r.machine)
             << ',' << r.trial << ',';
        if (r.cut) line << *r.cut;
        line << ',';
        if (r.optimum) line << *r.optimum;
        line << ',';
        if (r.synchronized) line << std::setprecision(4) << r.residual_deg;
        line << ',' << (r.synchronized ? 1 : 0) << ',' << std::setprecision(1) << r.runtime_ms << '\n';
        out << line.str();
    }
}

void write_compare_csv(const Comparison &cmp, std::ostream &out) {
    out << "graph_id,best_eao,best_shil,deviation_pct\n";
    for (const auto &row : cmp.rows) {
        std::ostringstream line;
        line << row.graph_id << ',';
        if (row.best_eao) line << *row.best_eao;
        line << ',';
        if (row.best_shil) line << *row.best_shil;
        line << ',';
        if (row.deviation_pct) line << std::fixed << std::setprecision(3) << *row.deviation_pct;
        line << '\n';
        out << line.str();
    }
}

const std::vector<std::string> &experiment_config_keys() {
    static const std::vector<std::string> keys = {
        "machines", "trials", "trial_seed_base", "graph_file", "graph_gen", "sweep_sizes", "sweep_etas",
        "graphs_per_point", "graph_seed_base", "v_sat", "alpha", "r_f", "c_l", "r_d", "r_fet", "v_knee", "c_c",
        "shil_amplitude", "shil_follows_coupling", "shil_frequency", "dt", "n_cycles", "event_tol", "comparator_tol", "ic_spread", "sample_every",
        "coupling_scaling", "coupling_reference_degree", "degree_equalization",
        "readout_cycles", "sync_tol", "bipartition_threshold_deg", "run_oracle", "record_runtime", "threads", "out_dir",
    };
    return keys;
}

ExperimentSpec experiment_from_config(const Config &cfg) {
    cfg.check_known(experiment_config_keys());
    ExperimentSpec spec;

    if (auto s = cfg.get_string("machines")) {
        for (const auto &m : split_list(*s)) spec.machines.push_back(parse_machine(m));
    } else {
        spec.machines = {Machine::EaoNoInjection, Machine::ConventionalShil};
    }
    if (auto v = cfg.get_uint("trials")) spec.trials = *v;
    if (auto v = cfg.get_uint("trial_seed_base")) spec.trial_seed_base = *v;

    for (const auto &path : cfg.all("graph_file")) spec.graphs.push_back(file_instance(path));
    for (const auto &text : cfg.all("graph_gen")) {
        std::istringstream in(text);
        std::size_t n = 0;
        double eta = 0.0;
        std::uint64_t seed = 0;
        if (!(in >> n >> eta >> seed)) throw ConfigError("graph_gen expects 'n eta seed', got '" + text + "'");
        spec.graphs.push_back(generated_instance(n, eta, seed));
    }
    if (cfg.has("sweep_sizes") || cfg.has("sweep_etas")) {
        const auto sizes = split_list(cfg.get_string("sweep_sizes").value_or(""));
        const auto etas = split_list(cfg.get_string("sweep_etas").value_or(""));
        if (sizes.empty() || etas.empty()) throw ConfigError("sweep_sizes and sweep_etas must both be given");
        const auto per_point = cfg.get_uint("graphs_per_point").value_or(2);
        const auto seed_base = cfg.get_uint("graph_seed_base").value_or(1);
        for (const auto &ns : sizes) {
            for (const auto &es : etas) {
                for (std::uint64_t k = 0; k < per_point; ++k) {
                    spec.graphs.push_back(generated_instance(std::stoul(ns), std::stod(es), seed_base + k));
                }
            }
        }
    }

    auto set_double = [&](const char *key, double &field) {
        if (auto v = cfg.get_double(key)) field = *v;
    };
    set_double("v_sat", spec.device.v_sat);
    set_double("alpha", spec.device.alpha);
    set_double("r_f", spec.device.r_f);
    set_double("c_l", spec.device.c_l);
    set_double("r_d", spec.device.r_d);
    set_double("r_fet", spec.device.r_fet);
    set_double("v_knee", spec.device.v_knee);
    set_double("c_c", spec.c_c);
    set_double("shil_amplitude", spec.shil_amplitude);
    if (auto v = cfg.get_bool("shil_follows_coupling")) spec.shil_follows_coupling = *v;
    if (auto v = cfg.get_bool("coupling_scaling")) spec.coupling.scale_by_max_degree = *v;
    set_double("coupling_reference_degree", spec.coupling.reference_degree);
    if (auto v = cfg.get_bool("degree_equalization")) spec.coupling.equalize_degree = *v;
    if (auto v = cfg.get_double("shil_frequency"); v && *v > 0.0) spec.shil_frequency = *v;

    if (auto v = cfg.get_double("dt")) spec.sim.dt = *v;
    set_double("n_cycles", spec.sim.n_cycles);
    if (auto v = cfg.get_double("event_tol")) spec.sim.event_tol = *v;
    if (auto v = cfg.get_double("comparator_tol")) spec.sim.comparator_tol = *v;
    if (auto v = cfg.get_double("ic_spread")) spec.sim.ic_spread = *v;
    if (auto v = cfg.get_uint("sample_every")) spec.sim.sample_every = *v;

    if (auto v = cfg.get_uint("readout_cycles")) spec.readout_cycles = *v;
    set_double("sync_tol", spec.sync_tol);
    set_double("bipartition_threshold_deg", spec.bipartition_threshold_deg);
    if (auto v = cfg.get_bool("run_oracle")) spec.run_oracle = *v;
    if (auto v = cfg.get_bool("record_runtime")) spec.record_runtime = *v;
    if (auto v = cfg.get_uint("threads")) spec.threads = *v;

    spec.validate();
    return spec;
}

}  // namespace osc_ising
