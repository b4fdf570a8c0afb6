#include "osc_ising/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>

namespace osc_ising {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0) r += kTwoPi;
    return r >= kTwoPi ? 0.0 : r;
}

}  // namespace

double circular_distance(double a, double b) {
    const double d = wrap_2pi(a - b);
    return std::min(d, kTwoPi - d);
}

PhaseVector extract_phases(const Trace &trace, std::size_t k_cycles, double sync_tol) {
    if (k_cycles == 0) throw std::invalid_argument("extract_phases: k_cycles must be positive");
    const auto periods = mean_periods(trace, k_cycles);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < trace.n; ++i) {
        if (std::isnan(periods[i])) {
            throw UnsynchronizedError("oscillator " + std::to_string(i) + " has fewer than " +
                                      std::to_string(k_cycles + 1) + " rising edges");
        }
        lo = std::min(lo, periods[i]);
        hi = std::max(hi, periods[i]);
        sum += periods[i];
    }
    if (hi > lo * (1.0 + sync_tol)) {
        throw UnsynchronizedError("oscillators are not frequency locked (periods " + std::to_string(lo) + " to " +
                                  std::to_string(hi) + " s)");
    }

    PhaseVector out;
    out.period = sum / static_cast<double>(trace.n);
    out.phases.resize(trace.n);

    const auto ref_events = trace.flip_times(0, FlipDirection::Rising);
    const double t_ref = ref_events[ref_events.size() - k_cycles];

    std::vector<double> raw(trace.n);
    for (std::size_t i = 0; i < trace.n; ++i) {
        const auto r = trace.flip_times(i, FlipDirection::Rising);
        double c = 0.0, s = 0.0;
        for (std::size_t k = r.size() - k_cycles; k < r.size(); ++k) {
            const double theta = kTwoPi * (r[k] - t_ref) / out.period;
            c += std::cos(theta);
            s += std::sin(theta);
        }
        raw[i] = std::atan2(s, c);
    }
    for (std::size_t i = 0; i < trace.n; ++i) out.phases[i] = i == 0 ? 0.0 : wrap_2pi(raw[i] - raw[0]);
    return out;
}

namespace {

double rms_to_clusters(const std::vector<double> &phases, double phi0) {
    double acc = 0.0;
    for (double ph : phases) {
        const double d = std::min(circular_distance(ph, phi0), circular_distance(ph, phi0 + std::numbers::pi));
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(phases.size()));
}

}  // namespace

BipartitionFit fit_bipartition(const PhaseVector &p) {
    if (p.phases.empty()) return {};
    constexpr double deg = std::numbers::pi / 180.0;
    double best_phi = 0.0;
    double best = rms_to_clusters(p.phases, 0.0);
    for (int k = 1; k < 180; ++k) {
        const double phi = k * deg;
        const double r = rms_to_clusters(p.phases, phi);
        if (r < best) {
            best = r;
            best_phi = phi;
        }
    }
    // Golden-section refinement inside the neighbouring grid cells.
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_phi - deg, b = best_phi + deg;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = rms_to_clusters(p.phases, x1), f2 = rms_to_clusters(p.phases, x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = rms_to_clusters(p.phases, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = rms_to_clusters(p.phases, x2);
        }
    }
    const double refined = 0.5 * (a + b);
    const double fr = rms_to_clusters(p.phases, refined);
    if (fr < best) {
        best = fr;
        best_phi = refined;
    }
    best_phi = std::fmod(wrap_2pi(best_phi), std::numbers::pi);
    return {best / deg, best_phi};
}

double bipartition_residual(const PhaseVector &p) { return fit_bipartition(p).residual_deg; }

SpinAssignment phases_to_spins(const PhaseVector &p) {
    const double phi0 = fit_bipartition(p).phi0;
    std::vector<Spin> spins(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d_up = circular_distance(p.phases[i], phi0);
        const double d_down = circular_distance(p.phases[i], phi0 + std::numbers::pi);
        spins[i] = d_up <= d_down ? Spin{1} : Spin{-1};
    }
    return SpinAssignment(std::move(spins));
}

CutResult readout_cut(const Graph &g, const PhaseVector &p) {
    CutResult r = evaluate_cut(g, phases_to_spins(p));
    r.residual_deg = bipartition_residual(p);
    return r;
}

namespace {

struct FftwPlanDeleter {
    void operator()(fftw_plan_s *plan) const { fftw_destroy_plan(plan); }
};

struct FftwFree {
    void operator()(void *p) const { fftw_free(p); }
};

// Peak position and height by parabolic interpolation of log magnitudes around bin k.
std::pair<double, double> interpolate_peak(const std::vector<double> &mag, std::size_t k) {
    if (k == 0 || k + 1 >= mag.size() || mag[k - 1] <= 0 || mag[k + 1] <= 0 || mag[k] <= 0) {
        return {static_cast<double>(k), mag[k]};
    }
    const double a = std::log(mag[k - 1]), b = std::log(mag[k]), c = std::log(mag[k + 1]);
    const double denom = a - 2.0 * b + c;
    if (denom >= 0) return {static_cast<double>(k), mag[k]};
    const double offset = 0.5 * (a - c) / denom;
    return {static_cast<double>(k) + offset, std::exp(b - 0.25 * (a - c) * offset)};
}

}  // namespace

HarmonicRatio harmonic_ratio(std::span<const double> samples, double sample_rate) {
    const std::size_t n = samples.size();
    if (n < 64) throw SpectrumError("harmonic_ratio: need at least 64 samples");
    if (!(sample_rate > 0)) throw SpectrumError("harmonic_ratio: sample rate must be positive");

    std::size_t nfft = 1;
    while (nfft < 4 * n) nfft <<= 1;

    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);

    std::unique_ptr<double, FftwFree> in(static_cast<double *>(fftw_malloc(sizeof(double) * nfft)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * (nfft / 2 + 1))));
    double window_sum = 0.0;
    for (std::size_t i = 0; i < nfft; ++i) {
        if (i < n) {
            const double w = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
            window_sum += w;
            in.get()[i] = w * (samples[i] - mean);
        } else {
            in.get()[i] = 0.0;
        }
    }
    // FFTW_ESTIMATE leaves the input untouched and makes planning deterministic.
    std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan(
        fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.get(), out.get(), FFTW_ESTIMATE));
    fftw_execute(plan.get());

    std::vector<double> mag(nfft / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) {
        mag[k] = 2.0 * std::hypot(out.get()[k][0], out.get()[k][1]) / window_sum;
    }

    // Skip the window's DC main lobe (two original bins, oversampled).
    const std::size_t oversample = nfft / n;
    const std::size_t k_min = 3 * std::max<std::size_t>(oversample, 1);
    if (k_min + 2 >= mag.size()) throw SpectrumError("harmonic_ratio: record too short");
    const auto peak_it = std::max_element(mag.begin() + static_cast<std::ptrdiff_t>(k_min), mag.end() - 1);
    const auto k_peak = static_cast<std::size_t>(peak_it - mag.begin());

    std::vector<double> tail(mag.begin() + static_cast<std::ptrdiff_t>(k_min), mag.end());
    std::nth_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2), tail.end());
    const double median = tail[tail.size() / 2];
    if (!(*peak_it > 0.0) || *peak_it < 10.0 * median) throw SpectrumError("harmonic_ratio: no dominant spectral peak");

    const auto [bin1, a1] = interpolate_peak(mag, k_peak);
    HarmonicRatio h;
    h.f1 = bin1 * sample_rate / static_cast<double>(nfft);
    h.a_f1 = a1;
    const double periods = h.f1 * static_cast<double>(n) / sample_rate;
    if (periods < 16.0 - 1e-9) {
        throw SpectrumError("harmonic_ratio: record spans " + std::to_string(periods) + " periods, need 16");
    }

    const double bin2 = 2.0 * bin1;
    if (bin2 + 2.0 >= static_cast<double>(mag.size())) throw SpectrumError("harmonic_ratio: 2 f1 above Nyquist");
    // Largest bin within half an original bin of 2 f1.
    const auto centre = static_cast<std::size_t>(std::llround(bin2));
    const std::size_t reach = std::max<std::size_t>(oversample / 2, 1);
    std::size_t k2 = centre;
    for (std::size_t k = centre - reach; k <= centre + reach; ++k)
        if (mag[k] > mag[k2]) k2 = k;
    h.a_2f1 = interpolate_peak(mag, k2).second;
    h.ratio = h.a_2f1 / h.a_f1;
    return h;
}

Waveform synth_relaxation(double tA_over_T, double tau1, double tau2, double period, std::size_t n_periods,
                          std::size_t samples_per_period) {
    if (!(tA_over_T > 0.0 && tA_over_T < 1.0)) throw std::invalid_argument("synth_relaxation: tA_over_T must lie in (0, 1)");
    if (!(tau1 > 0.0) || !(tau2 >= tau1)) throw std::invalid_argument("synth_relaxation: need 0 < tau1 <= tau2");
    if (!(period > 0.0) || n_periods == 0 || samples_per_period < 4) {
        throw std::invalid_argument("synth_relaxation: invalid period or sampling");
    }
    const double t_a = tA_over_T * period;
    const double junction = std::exp(-t_a / tau1);
    Waveform w;
    w.sample_rate = static_cast<double>(samples_per_period) / period;
    w.samples.resize(n_periods * samples_per_period);
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const double phase = static_cast<double>(i % samples_per_period) * period / static_cast<double>(samples_per_period);
        w.samples[i] = phase < t_a ? std::exp(-phase / tau1) : junction * std::exp(-(phase - t_a) / tau2);
    }
    return w;
}

SweepConfig SweepConfig::defaults() {
    SweepConfig cfg;
    for (int k = 1; k <= 9; ++k) cfg.tA_over_T.push_back(0.05 * k);
    cfg.taus.push_back(default_taus(cfg.period));
    return cfg;
}

std::vector<SweepRow> sweep_harmonic_ratio(const SweepConfig &cfg) {
    if (cfg.tA_over_T.empty() || cfg.taus.empty()) throw std::invalid_argument("sweep_harmonic_ratio: empty grid");
    std::vector<SweepRow> rows;
    rows.reserve(cfg.tA_over_T.size() * cfg.taus.size());
    for (const auto &taus : cfg.taus) {
        for (double f : cfg.tA_over_T) {
            const auto w = synth_relaxation(f, taus.tau1, taus.tau2, cfg.period, cfg.n_periods, cfg.samples_per_period);
            rows.push_back({f, taus, harmonic_ratio(w)});
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow> &rows, std::ostream &out) {
    out << "tA_over_T,tau1,tau2,f1,A_f1,A_2f1,ratio\n";
    const auto old_precision = out.precision(8);
    for (const auto &r : rows) {
        out << r.tA_over_T << ',' << r.taus.tau1 << ',' << r.taus.tau2 << ',' << r.h.f1 << ',' << r.h.a_f1 << ','
            << r.h.a_2f1 << ',' << r.h.ratio << '\n';
    }
    out.precision(old_precision);
}

}  // namespace osc_ising
