#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "qfc/quadrature.hpp"
#include "qfc/sfg.hpp"

// Time-domain integration of the linearized cavity equations driven by
// synthesized entangled + vacuum noise, with Welch spectral estimation.
//
// Conventions (locked together, tested by the chi_e = 0 calibration):
//  * time is normalized to t * gamma1 / tau, so the spectral axis is the
//    gamma1-normalized sideband frequency Omega;
//  * every vacuum input stream has unit variance per sample;
//  * the PSD estimator reports 1 for a unit-variance white stream at all
//    Omega (two-sided value, no one-sided folding).

namespace qfc {

namespace detail {
class RealFftPlan;
}

struct SimConfig {
    double dt = 0.005;           // step, units of tau/gamma1
    double duration = 2e5;       // total normalized time
    std::uint64_t seed = 424242;
    std::size_t welch_segment = 16384;  // samples per Welch segment
    double welch_overlap = 0.0;         // fraction in [0, 1)

    std::size_t steps() const noexcept { return static_cast<std::size_t>(duration / dt); }
    /// Rejects non-positive dt, fewer than 10 Welch segments, or bad overlap.
    void validate() const;
    /// Explicit-integrator stability advisory: dt * max(loss rate) < 0.1.
    bool stability_advisory(const SfgParams& p) const noexcept;
};

/// Quadrature streams of the entangled pair.
struct EprTraces {
    double dt = 0.0;
    std::vector<double> x_a1, y_a1, x_a2, y_a2;
};

/// Recorded observables of one integration run.
struct QuadratureTrace {
    double dt = 0.0;
    std::vector<double> x_a2, y_a2, x_b3, y_b3;

    std::size_t size() const noexcept { return x_b3.size(); }
    /// Plain CSV dump, header "t,Xa2,Ya2,Xb3,Yb3".
    void write_csv(std::ostream& out) const;
};

/// Sample-wise generator of the entangled quadruple (X_a1, Y_a1, X_a2, Y_a2):
/// white unit-variance seeds pushed through the squeezing transform, so each
/// beam quadrature has per-sample variance cosh 2r and PSD cosh 2r.
class EprStreamSynth {
public:
    EprStreamSynth(SqueezeFactor r, std::uint64_t seed);
    std::array<double, 4> next();

private:
    double ch_, sh_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_;
};

/// Explicit Euler stepper for the two intracavity complex amplitudes. Vacuum
/// channels (converted-port input and both loss channels) are drawn
/// internally from the seed; the output sample applies the boundary
/// condition out = sqrt(2 gamma3) beta3 - b3_in at the current step.
class SfgCavity {
public:
    SfgCavity(const SfgParams& p, double dt, std::uint64_t seed);

    /// Consume one signal-input sample (complex b1_in = X + iY), advance one
    /// step, return the converted output sample. Throws NumericalError if
    /// the state diverges.
    std::complex<double> step(std::complex<double> b1_in);

private:
    double dt_;
    double loss1_, loss3_;      // (gamma+rho)/gamma1
    double coupling_;           // chi_e/gamma1
    double in1_, inc1_, in3_, inc3_;  // noise couplings
    std::complex<double> beta1_{0.0, 0.0};
    std::complex<double> beta3_{0.0, 0.0};
    std::size_t step_count_ = 0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_;
};

EprTraces synthesize_epr_streams(SqueezeFactor r, std::size_t n, double dt,
                                 std::uint64_t seed);

QuadratureTrace integrate_sfg(const SfgParams& p, const EprTraces& input,
                              std::uint64_t seed);

struct PsdEstimate {
    double omega;      // realized bin frequency
    double value;      // mean over segments
    double std_error;  // std across segments / sqrt(n)
    std::size_t segments;
};

/// Streaming Welch estimator: Hann-windowed segments, periodograms averaged
/// bin-wise. Memory is one segment plus per-bin running moments.
class WelchAccumulator {
public:
    WelchAccumulator(std::size_t segment_len, double overlap, double dt);
    ~WelchAccumulator();
    WelchAccumulator(const WelchAccumulator&) = delete;
    WelchAccumulator& operator=(const WelchAccumulator&) = delete;
    WelchAccumulator(WelchAccumulator&&) noexcept;
    WelchAccumulator& operator=(WelchAccumulator&&) noexcept;

    void push(double sample);
    void push(std::span<const double> samples);

    std::size_t segments() const noexcept { return segments_; }
    double bin_spacing() const noexcept;
    /// Estimate at the bin nearest to omega. Requires >= 2 segments.
    PsdEstimate at_omega(double omega) const;
    /// Mean PSD over all bins with center frequency in [lo, hi].
    double band_average(double lo, double hi) const;

private:
    void consume_segment();

    std::size_t len_;
    std::size_t hop_;
    double dt_;
    double window_norm_;  // sum of squared window
    std::vector<double> window_;
    std::vector<double> buffer_;
    std::size_t fill_ = 0;
    std::size_t segments_ = 0;
    std::vector<double> sum_, sum_sq_;  // per-bin running moments
    std::unique_ptr<detail::RealFftPlan> fft_;
};

/// One-shot estimate at the bin nearest to omega, using the config's segment
/// length and overlap. Throws when samples support fewer than 10 segments.
PsdEstimate estimate_psd(std::span<const double> samples, double dt,
                         const SimConfig& cfg, double omega);

/// Welch estimator for the phased two-channel combination
/// |X_out(Omega) - g e^{i theta} X_ret(Omega)|^2. The retained-channel phase
/// theta acts per analysis sideband (the electronic phase of the correlation
/// measurement at that frequency). A static time-domain rotation cannot do
/// this off Omega = 0: the on-resonance cavity filters both quadratures with
/// the same complex response, so only the per-frequency combination reaches
/// the analytic optimum.
class CombinationSpectrum {
public:
    CombinationSpectrum(std::size_t segment_len, double overlap, double dt);
    ~CombinationSpectrum();
    CombinationSpectrum(const CombinationSpectrum&) = delete;
    CombinationSpectrum& operator=(const CombinationSpectrum&) = delete;
    CombinationSpectrum(CombinationSpectrum&&) noexcept;
    CombinationSpectrum& operator=(CombinationSpectrum&&) noexcept;

    double bin_spacing() const noexcept;
    /// Register a probe at the bin nearest to omega; call before pushing.
    std::size_t add_probe(double omega, double gain, double theta);
    void push(double output_sample, double retained_sample);
    std::size_t segments() const noexcept { return segments_; }
    PsdEstimate probe(std::size_t index) const;

private:
    void consume_segment();

    std::size_t len_;
    std::size_t hop_;
    double dt_;
    double window_norm_;
    std::vector<double> window_;
    std::vector<double> buf_out_, buf_ret_;
    std::size_t fill_ = 0;
    std::size_t segments_ = 0;
    struct ProbeState {
        std::size_t bin;
        double gain;
        std::complex<double> phase;
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    std::vector<ProbeState> probes_;
    std::unique_ptr<detail::RealFftPlan> fft_;
};

}  // namespace qfc
