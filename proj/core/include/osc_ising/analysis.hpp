#ifndef OSC_ISING_ANALYSIS_HPP
#define OSC_ISING_ANALYSIS_HPP

#include "osc_ising/graph.hpp"
#include "osc_ising/network.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace osc_ising {

/// Oscillator phases in [0, 2pi), measured relative to oscillator 0.
struct PhaseVector {
    std::vector<double> phases;
    double period = 0.0;  // mean period used for the readout (seconds)

    std::size_t size() const { return phases.size(); }
};

/// Raised when a trace cannot be read out as a phase vector (missing cycles or unequal periods).
class UnsynchronizedError : public SynchronizationError {
public:
    using SynchronizationError::SynchronizationError;
};

/// Phase readout from the Low -> High comparator flips of the last k_cycles cycles.
/// Requires every oscillator's mean period to agree within sync_tol (relative).
PhaseVector extract_phases(const Trace &trace, std::size_t k_cycles, double sync_tol = 0.02);

/// Shortest angular distance between two angles, in [0, pi].
double circular_distance(double a, double b);

/// Best two-cluster fit {phi0, phi0 + pi} of a phase vector.
struct BipartitionFit {
    double residual_deg = 0.0;  // RMS distance to the nearer cluster centre
    double phi0 = 0.0;          // radians, in [0, pi)
};

BipartitionFit fit_bipartition(const PhaseVector &p);
double bipartition_residual(const PhaseVector &p);

/// Spin +1 for phases closer to phi0 than to phi0 + pi (ties go to +1).
SpinAssignment phases_to_spins(const PhaseVector &p);

/// Convenience: spins, cut, energy and residual of a phase readout.
CutResult readout_cut(const Graph &g, const PhaseVector &p);

class SpectrumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Waveform {
    std::vector<double> samples;
    double sample_rate = 0.0;  // hertz
};

struct HarmonicRatio {
    double f1 = 0.0;
    double a_f1 = 0.0;
    double a_2f1 = 0.0;
    double ratio = 0.0;
};

/// Hann-windowed, zero-padded spectrum; the fundamental is the largest peak above DC and both
/// magnitudes are refined by parabolic interpolation of the log spectrum. Throws SpectrumError
/// for flat spectra or fewer than 16 fundamental periods.
HarmonicRatio harmonic_ratio(std::span<const double> samples, double sample_rate);
inline HarmonicRatio harmonic_ratio(const Waveform &w) { return harmonic_ratio(w.samples, w.sample_rate); }

/// Periodic relaxation waveform normalised to a peak of 1: instantaneous rise at the start of
/// each period, exp decay with tau1 for t_A = tA_over_T * period, then tau2 until the period ends.
Waveform synth_relaxation(double tA_over_T, double tau1, double tau2, double period, std::size_t n_periods,
                          std::size_t samples_per_period = 256);

struct TauPair {
    double tau1;
    double tau2;
};

struct SweepRow {
    double tA_over_T;
    TauPair taus;
    HarmonicRatio h;
};

struct SweepConfig {
    std::vector<double> tA_over_T;
    std::vector<TauPair> taus;
    double period = 1e-3;
    std::size_t n_periods = 32;
    std::size_t samples_per_period = 256;

    /// t_A/T in {0.05, 0.10, ..., 0.45} with the default tau pair.
    static SweepConfig defaults();
    static TauPair default_taus(double period) { return {0.5 * period, 500.0 * period}; }
};

/// One row per (tau pair, t_A/T) point; tau pairs vary slowest.
std::vector<SweepRow> sweep_harmonic_ratio(const SweepConfig &cfg);

void write_sweep_csv(const std::vector<SweepRow> &rows, std::ostream &out);

}  // namespace osc_ising

#endif  // OSC_ISING_ANALYSIS_HPP
