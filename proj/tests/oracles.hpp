#ifndef OSC_ISING_TESTS_ORACLES_HPP
#define OSC_ISING_TESTS_ORACLES_HPP

// Reference computations written independently of the library code paths they check.

#include "osc_ising/graph.hpp"
#include "osc_ising/network.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

using osc_ising::Graph;

// Edges whose endpoints sit on different sides of the bitmask partition.
inline std::size_t cut_of_mask(const Graph &g, std::uint64_t mask) {
    std::size_t cut = 0;
    for (const auto &[u, v] : g.edges()) cut += (((mask >> u) ^ (mask >> v)) & 1u) ? 1 : 0;
    return cut;
}

// Full 2^n enumeration, no symmetry reduction and no incremental updates.
inline std::size_t exhaustive_maxcut(const Graph &g) {
    std::size_t best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.node_count()); ++mask) {
        best = std::max(best, cut_of_mask(g, mask));
    }
    return best;
}

inline osc_ising::SpinAssignment spins_of_mask(std::size_t n, std::uint64_t mask) {
    std::vector<osc_ising::Spin> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = ((mask >> i) & 1u) ? -1 : 1;
    return osc_ising::SpinAssignment(std::move(s));
}

// Conventional oscillator: exponential approach toward +-v_sat between the +-alpha v_sat thresholds.
inline double closed_form_period(double r_f, double r_d, double c_l, double alpha) {
    const double log_ratio = std::log((1.0 + alpha) / (1.0 - alpha));
    const double tau_discharge = r_f * c_l;
    const double tau_rise = (r_f * r_d / (r_f + r_d)) * c_l;
    return (tau_discharge + tau_rise) * log_ratio;
}

inline double wrap_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    return std::min(d, 2.0 * std::numbers::pi - d);
}

// Bipartition residual on a dense 0.01 degree grid with no refinement step.
inline double grid_residual_deg(const std::vector<double> &phases) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 18000; ++k) {
        const double phi = k * std::numbers::pi / 18000.0;
        double acc = 0.0;
        for (double p : phases) {
            const double d = std::min(wrap_distance(p, phi), wrap_distance(p, phi + std::numbers::pi));
            acc += d * d;
        }
        best = std::min(best, std::sqrt(acc / static_cast<double>(phases.size())));
    }
    return best * 180.0 / std::numbers::pi;
}

// Magnitude of the k-th Fourier coefficient of one period sampled at m points.
inline double fourier_magnitude(const std::vector<double> &one_period, int k) {
    std::complex<double> acc = 0.0;
    const double m = static_cast<double>(one_period.size());
    for (std::size_t j = 0; j < one_period.size(); ++j) {
        acc += one_period[j] * std::polar(1.0, -2.0 * std::numbers::pi * k * static_cast<double>(j) / m);
    }
    return std::abs(acc) / m;
}

// Trace carrying only rising edges, osc i firing at offset[i] + c * period for c in [0, cycles).
inline osc_ising::Trace rising_edge_trace(const std::vector<double> &offsets, double period, std::size_t cycles,
                                          double shift = 0.0) {
    osc_ising::Trace tr;
    tr.n = offsets.size();
    for (std::size_t c = 0; c < cycles; ++c) {
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            const double t = shift + offsets[i] + static_cast<double>(c) * period;
            tr.flip_events.push_back({i, t, osc_ising::FlipDirection::Rising});
            tr.flip_events.push_back({i, t + 0.5 * period, osc_ising::FlipDirection::Falling});
        }
    }
    std::stable_sort(tr.flip_events.begin(), tr.flip_events.end(),
                     [](const auto &a, const auto &b) { return a.t < b.t; });
    return tr;
}

}  // namespace oracle

#endif  // OSC_ISING_TESTS_ORACLES_HPP
