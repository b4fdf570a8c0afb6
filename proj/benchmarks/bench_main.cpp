#include "osc_ising/analysis.hpp"
#include "osc_ising/graph.hpp"
#include "osc_ising/network.hpp"

#include <benchmark/benchmark.h>

using namespace osc_ising;

static void BM_BruteForceMaxcut(benchmark::State &state) {
    const Graph g = gen_random(static_cast<std::size_t>(state.range(0)), 0.5, 1);
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_maxcut(g).cut);
}
BENCHMARK(BM_BruteForceMaxcut)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);

static void BM_NetworkRun(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const CouplingSpec spec = make_coupling(gen_random(n, 0.5, 1), 1e-9, CouplingPolicy{});
    SimConfig cfg;
    cfg.n_cycles = 10;
    for (auto _ : state) benchmark::DoNotOptimize(run(OscillatorParams::eao(), spec, {}, cfg).flip_events.size());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.resolve(OscillatorParams::eao(), n).steps));
}
BENCHMARK(BM_NetworkRun)->Arg(4)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_HarmonicRatio(benchmark::State &state) {
    const Waveform w = synth_relaxation(0.2, 0.5e-3, 0.5, 1e-3, 32, 256);
    for (auto _ : state) benchmark::DoNotOptimize(harmonic_ratio(w).ratio);
}
BENCHMARK(BM_HarmonicRatio)->Unit(benchmark::kMicrosecond);

static void BM_BipartitionResidual(benchmark::State &state) {
    PhaseVector p;
    for (std::size_t i = 0; i < static_cast<std::size_t>(state.range(0)); ++i) p.phases.push_back(0.37 * static_cast<double>(i));
    for (auto _ : state) benchmark::DoNotOptimize(bipartition_residual(p));
}
BENCHMARK(BM_BipartitionResidual)->Arg(16)->Arg(128);
BENCHMARK_MAIN();
