#ifndef OSC_ISING_EXPERIMENT_HPP
#define OSC_ISING_EXPERIMENT_HPP

#include "osc_ising/analysis.hpp"
#include "osc_ising/config.hpp"
#include "osc_ising/graph.hpp"
#include "osc_ising/network.hpp"
#include "osc_ising/oscillator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace osc_ising {

enum class Machine : std::uint8_t {
    EaoNoInjection,           // autaptic devices, free running
    ConventionalNoInjection,  // plain devices, free running
    ConventionalShil,         // plain devices + second-harmonic injection
};

std::string_view to_string(Machine m);
Machine parse_machine(std::string_view text);

struct GraphInstance {
    std::string id;
    Graph graph;
    double eta = 0.0;  // edge density of the instance
};

GraphInstance generated_instance(std::size_t n, double eta, std::uint64_t graph_seed);
GraphInstance file_instance(const std::string &path);

struct ExperimentSpec {
    std::vector<Machine> machines;
    std::vector<GraphInstance> graphs;
    std::size_t trials = 10;
    std::uint64_t trial_seed_base = 1;

    /// Device constants shared by every machine; the machine decides the device kind.
    OscillatorParams device = OscillatorParams::eao();
    double c_c = 1e-9;
    CouplingPolicy coupling;
    double shil_amplitude = 2e-5;
    /// Multiply shil_amplitude by the same factor the coupling policy applies to c_c.
    bool shil_follows_coupling = true;
    /// Injection frequency; unset means twice the measured free-running network frequency.
    std::optional<double> shil_frequency;
    SimConfig sim;

    std::size_t readout_cycles = 10;
    double sync_tol = 0.02;
    double bipartition_threshold_deg = 15.0;
    bool run_oracle = true;
    bool record_runtime = true;
    std::size_t threads = 0;  // 0: hardware concurrency, capped by OSC_ISING_THREADS

    OscillatorParams params_for(Machine m) const;
    CouplingSpec coupling_for(const Graph &g) const { return make_coupling(g, c_c, coupling); }
    InjectionConfig injection_for(Machine m, double shil_frequency_hz, const Graph &g) const;
    void validate() const;
};

struct TrialResult {
    std::string graph_id;
    std::size_t n = 0;
    double eta = 0.0;
    Machine machine = Machine::EaoNoInjection;
    std::size_t trial = 0;
    std::optional<std::size_t> cut;
    std::optional<std::size_t> optimum;
    double residual_deg = 0.0;
    bool synchronized = false;
    double runtime_ms = 0.0;
    std::string failure;  // empty unless the run or readout failed
    std::vector<double> phases;

    /// Synchronized and below the bipartition threshold.
    bool bipartite(double threshold_deg) const { return synchronized && residual_deg < threshold_deg; }
};

/// Stable per-trial seed: independent of batch composition and execution order.
std::uint64_t trial_seed(std::uint64_t base, std::string_view graph_id, std::size_t trial);

/// Median oscillator period of a free-running conventional network on the graph.
double free_running_period(const ExperimentSpec &spec, const GraphInstance &g);

/// Twice the free-running network frequency, or the configured override.
double shil_frequency_for(const ExperimentSpec &spec, const GraphInstance &g);

/// Runs one (graph, machine, trial); failures are captured in the result, never thrown.
/// When trace_out is set it receives the simulated trace.
TrialResult run_trial(const ExperimentSpec &spec, const GraphInstance &g, Machine m, std::size_t trial,
                      double shil_frequency_hz, std::optional<std::size_t> optimum = std::nullopt,
                      Trace *trace_out = nullptr);

/// All (graph, machine, trial) combinations, sorted by (graph, machine, trial).
std::vector<TrialResult> run_experiment(const ExperimentSpec &spec);

struct ComparisonRow {
    std::string graph_id;
    std::size_t n = 0;
    double eta = 0.0;
    std::optional<std::size_t> best_eao;
    std::optional<std::size_t> best_shil;
    double mean_eao = 0.0;
    double mean_shil = 0.0;
    std::optional<std::size_t> optimum;
    std::optional<double> deviation_pct;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::vector<std::string> warnings;
    /// Mean of the finite per-graph deviations.
    std::optional<double> mean_deviation_pct;
};

/// deviation_pct = 100 (best_eao - best_shil) / best_shil over synchronized trials.
Comparison compare_machines(const std::vector<TrialResult> &results);

double deviation_pct(double cut_eao, double cut_shil);

void write_bench_csv(const std::vector<TrialResult> &results, std::ostream &out);
void write_compare_csv(const Comparison &cmp, std::ostream &out);

/// Builds a spec from `key = value` settings; see README for the key list.
ExperimentSpec experiment_from_config(const Config &cfg);
const std::vector<std::string> &experiment_config_keys();

/// Worker count: requested (0 = hardware), capped by OSC_ISING_THREADS when set.
std::size_t resolve_thread_count(std::size_t requested);

}  // namespace osc_ising

#endif  // OSC_ISING_EXPERIMENT_HPP
