#include "qfc/langevin.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "qfc/errors.hpp"

namespace qfc {

void SimConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt) || !(duration > 0.0)) {
        throw std::invalid_argument("simulation needs dt > 0 and duration > 0");
    }
    if (welch_segment < 8) {
        throw std::invalid_argument("welch segment too short");
    }
    if (!(welch_overlap >= 0.0) || welch_overlap >= 1.0) {
        throw std::invalid_argument("welch overlap must lie in [0, 1)");
    }
    if (steps() < 10 * welch_segment) {
        throw std::invalid_argument("duration supports fewer than 10 Welch segments");
    }
}

bool SimConfig::stability_advisory(const SfgParams& p) const noexcept {
    const double rate = std::max(p.gamma1 + p.rho1, p.gamma3 + p.rho3) / p.gamma1;
    return dt * rate < 0.1;
}

void QuadratureTrace::write_csv(std::ostream& out) const {
    out << "t,Xa2,Ya2,Xb3,Yb3\n";
    char line[160];
    for (std::size_t i = 0; i < size(); ++i) {
        std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      static_cast<double>(i) * dt, x_a2[i], y_a2[i], x_b3[i], y_b3[i]);
        out << line;
    }
}

EprStreamSynth::EprStreamSynth(SqueezeFactor r, std::uint64_t seed)
    : ch_(std::cosh(r.value())), sh_(std::sinh(r.value())), rng_(seed) {}

std::array<double, 4> EprStreamSynth::next() {
    const double x01 = gauss_(rng_);
    const double y01 = gauss_(rng_);
    const double x02 = gauss_(rng_);
    const double y02 = gauss_(rng_);
    return {ch_ * x01 + sh_ * x02, ch_ * y01 - sh_ * y02,
            ch_ * x02 + sh_ * x01, ch_ * y02 - sh_ * y01};
}

SfgCavity::SfgCavity(const SfgParams& p, double dt, std::uint64_t seed)
    : dt_(dt),
      loss1_((p.gamma1 + p.rho1) / p.gamma1),
      loss3_((p.gamma3 + p.rho3) / p.gamma1),
      coupling_(p.chi_e / p.gamma1),
      in1_(std::sqrt(2.0 * p.gamma1 / p.gamma1)),
      inc1_(std::sqrt(2.0 * p.rho1 / p.gamma1)),
      in3_(std::sqrt(2.0 * p.gamma3 / p.gamma1)),
      inc3_(std::sqrt(2.0 * p.rho3 / p.gamma1)),
      rng_(seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
}

std::complex<double> SfgCavity::step(std::complex<double> b1_in) {
    const std::complex<double> c1_in(gauss_(rng_), gauss_(rng_));
    const std::complex<double> b3_in(gauss_(rng_), gauss_(rng_));
    const std::complex<double> c3_in(gauss_(rng_), gauss_(rng_));

    // Boundary condition at the current step, before the state advances.
    const std::complex<double> out = in3_ * beta3_ - b3_in;

    const std::complex<double> drift1 =
        -loss1_ * beta1_ + coupling_ * beta3_ + in1_ * b1_in + inc1_ * c1_in;
    const std::complex<double> drift3 =
        -loss3_ * beta3_ - coupling_ * beta1_ + in3_ * b3_in + inc3_ * c3_in;
    beta1_ += dt_ * drift1;
    beta3_ += dt_ * drift3;
    ++step_count_;

    const double mag = std::norm(beta1_) + std::norm(beta3_);
    if (!std::isfinite(mag) || mag > 1e12) {
        throw NumericalError("cavity integration diverged at step " +
                             std::to_string(step_count_) +
                             "; reduce dt (stability advisory: dt * loss rate < 0.1)");
    }
    return out;
}

EprTraces synthesize_epr_streams(SqueezeFactor r, std::size_t n, double dt,
                                 std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("need at least two samples");
    EprTraces t;
    t.dt = dt;
    t.x_a1.reserve(n);
    t.y_a1.reserve(n);
    t.x_a2.reserve(n);
    t.y_a2.reserve(n);
    EprStreamSynth synth(r, seed);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = synth.next();
        t.x_a1.push_back(s[0]);
        t.y_a1.push_back(s[1]);
        t.x_a2.push_back(s[2]);
        t.y_a2.push_back(s[3]);
    }
    return t;
}

QuadratureTrace integrate_sfg(const SfgParams& p, const EprTraces& input,
                              std::uint64_t seed) {
    const std::size_t n = input.x_a1.size();
    QuadratureTrace trace;
    trace.dt = input.dt;
    trace.x_a2 = input.x_a2;
    trace.y_a2 = input.y_a2;
    trace.x_b3.reserve(n);
    trace.y_b3.reserve(n);

    SfgCavity cavity(p, input.dt, seed);
    for (std::size_t i = 0; i < n; ++i) {
        const auto out = cavity.step({input.x_a1[i], input.y_a1[i]});
        trace.x_b3.push_back(out.real());
        trace.y_b3.push_back(out.imag());
    }
    return trace;
}

// ---------------------------------------------------------------------------

namespace detail {

class RealFftPlan {
public:
    explicit RealFftPlan(std::size_t n) : len_(n) {
        in_ = fftw_alloc_real(n);
        out_ = fftw_alloc_complex(n / 2 + 1);
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
        if (plan_ == nullptr) throw NumericalError("fftw plan creation failed");
    }
    ~RealFftPlan() {
        if (plan_ != nullptr) fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFftPlan(const RealFftPlan&) = delete;
    RealFftPlan& operator=(const RealFftPlan&) = delete;

    /// Windowed forward transform; output valid until the next call.
    void execute(const std::vector<double>& samples, const std::vector<double>& window) {
        for (std::size_t i = 0; i < len_; ++i) in_[i] = samples[i] * window[i];
        fftw_execute(plan_);
    }
    std::complex<double> bin(std::size_t k) const {
        return {out_[k][0], out_[k][1]};
    }

private:
    std::size_t len_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace detail

namespace {

std::vector<double> hann_window(std::size_t len, double* norm) {
    std::vector<double> w(len);
    *norm = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(len)));
        *norm += w[i] * w[i];
    }
    return w;
}

std::size_t welch_hop(std::size_t len, double overlap) {
    if (len < 8) throw std::invalid_argument("welch segment too short");
    if (!(overlap >= 0.0) || overlap >= 1.0) {
        throw std::invalid_argument("welch overlap must lie in [0, 1)");
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(len) *
                                                             (1.0 - overlap)));
}

}  // namespace

WelchAccumulator::WelchAccumulator(std::size_t segment_len, double overlap, double dt)
    : len_(segment_len), hop_(welch_hop(segment_len, overlap)), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    window_ = hann_window(len_, &window_norm_);
    buffer_.resize(len_);
    const std::size_t bins = len_ / 2 + 1;
    sum_.assign(bins, 0.0);
    sum_sq_.assign(bins, 0.0);
    fft_ = std::make_unique<detail::RealFftPlan>(len_);
}

WelchAccumulator::~WelchAccumulator() = default;
WelchAccumulator::WelchAccumulator(WelchAccumulator&&) noexcept = default;
WelchAccumulator& WelchAccumulator::operator=(WelchAccumulator&&) noexcept = default;

void WelchAccumulator::push(double sample) {
    buffer_[fill_++] = sample;
    if (fill_ == len_) consume_segment();
}

void WelchAccumulator::push(std::span<const double> samples) {
    for (const double s : samples) push(s);
}

void WelchAccumulator::consume_segment() {
    fft_->execute(buffer_, window_);
    // |X_k|^2 / sum(w^2) estimates the two-sided PSD in per-sample units:
    // a unit-variance white stream reads 1 at every bin.
    for (std::size_t k = 0; k < sum_.size(); ++k) {
        const double p = std::norm(fft_->bin(k)) / window_norm_;
        sum_[k] += p;
        sum_sq_[k] += p * p;
    }
    ++segments_;

    if (hop_ < len_) {
        std::copy(buffer_.begin() + static_cast<std::ptrdiff_t>(hop_), buffer_.end(),
                  buffer_.begin());
        fill_ = len_ - hop_;
    } else {
        fill_ = 0;
    }
}

double WelchAccumulator::bin_spacing() const noexcept {
    return 2.0 * std::numbers::pi / (static_cast<double>(len_) * dt_);
}

PsdEstimate WelchAccumulator::at_omega(double omega) const {
    if (segments_ < 2) {
        throw NumericalError("insufficient data: fewer than two Welch segments");
    }
    const double spacing = bin_spacing();
    std::size_t k = static_cast<std::size_t>(std::llround(std::abs(omega) / spacing));
    if (k > len_ / 2) k = len_ / 2;

    const double n = static_cast<double>(segments_);
    const double mean = sum_[k] / n;
    const double var = std::max(0.0, sum_sq_[k] / n - mean * mean);
    const double se = std::sqrt(var / std::max(1.0, n - 1.0));
    return PsdEstimate{.omega = static_cast<double>(k) * spacing,
                       .value = mean,
                       .std_error = se,
                       .segments = segments_};
}

double WelchAccumulator::band_average(double lo, double hi) const {
    if (segments_ < 1) {
        throw NumericalError("insufficient data: no complete Welch segment");
    }
    const double spacing = bin_spacing();
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k <= len_ / 2; ++k) {
        const double w = static_cast<double>(k) * spacing;
        if (w >= lo && w <= hi) {
            acc += sum_[k] / static_cast<double>(segments_);
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("band contains no Welch bin");
    return acc / static_cast<double>(count);
}

PsdEstimate estimate_psd(std::span<const double> samples, double dt,
                         const SimConfig& cfg, double omega) {
    WelchAccumulator acc(cfg.welch_segment, cfg.welch_overlap, dt);
    acc.push(samples);
    if (acc.segments() < 10) {
        throw std::invalid_argument("insufficient data: need at least 10 Welch segments");
    }
    return acc.at_omega(omega);
}

// ---------------------------------------------------------------------------

CombinationSpectrum::CombinationSpectrum(std::size_t segment_len, double overlap, double dt)
    : len_(segment_len), hop_(welch_hop(segment_len, overlap)), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    window_ = hann_window(len_, &window_norm_);
    buf_out_.resize(len_);
    buf_ret_.resize(len_);
    fft_ = std::make_unique<detail::RealFftPlan>(len_);
}

CombinationSpectrum::~CombinationSpectrum() = default;
CombinationSpectrum::CombinationSpectrum(CombinationSpectrum&&) noexcept = default;
CombinationSpectrum& CombinationSpectrum::operator=(CombinationSpectrum&&) noexcept = default;

double CombinationSpectrum::bin_spacing() const noexcept {
    return 2.0 * std::numbers::pi / (static_cast<double>(len_) * dt_);
}

std::size_t CombinationSpectrum::add_probe(double omega, double gain, double theta) {
    if (segments_ != 0 || fill_ != 0) {
        throw std::invalid_argument("probes must be registered before samples arrive");
    }
    std::size_t k = static_cast<std::size_t>(std::llround(std::abs(omega) / bin_spacing()));
    if (k > len_ / 2) k = len_ / 2;
    probes_.push_back(ProbeState{.bin = k,
                                 .gain = gain,
                                 .phase = std::polar(1.0, theta),
                                 .sum = 0.0,
                                 .sum_sq = 0.0});
    return probes_.size() - 1;
}

void CombinationSpectrum::push(double output_sample, double retained_sample) {
    buf_out_[fill_] = output_sample;
    buf_ret_[fill_] = retained_sample;
    if (++fill_ == len_) consume_segment();
}

void CombinationSpectrum::consume_segment() {
    // Two transforms per segment; combine per probe at its bin.
    std::vector<std::complex<double>> out_bins(probes_.size());
    fft_->execute(buf_out_, window_);
    for (std::size_t i = 0; i < probes_.size(); ++i) out_bins[i] = fft_->bin(probes_[i].bin);
    fft_->execute(buf_ret_, window_);
    for (std::size_t i = 0; i < probes_.size(); ++i) {
        ProbeState& p = probes_[i];
        const double v =
            std::norm(out_bins[i] - p.gain * p.phase * fft_->bin(p.bin)) / window_norm_;
        p.sum += v;
        p.sum_sq += v * v;
    }
    ++segments_;

    if (hop_ < len_) {
        const auto shift = static_cast<std::ptrdiff_t>(hop_);
        std::copy(buf_out_.begin() + shift, buf_out_.end(), buf_out_.begin());
        std::copy(buf_ret_.begin() + shift, buf_ret_.end(), buf_ret_.begin());
        fill_ = len_ - hop_;
    } else {
        fill_ = 0;
    }
}

PsdEstimate CombinationSpectrum::probe(std::size_t index) const {
    if (segments_ < 2) {
        throw NumericalError("insufficient data: fewer than two Welch segments");
    }
    const ProbeState& p = probes_.at(index);
    const double n = static_cast<double>(segments_);
    const double mean = p.sum / n;
    const double var = std::max(0.0, p.sum_sq / n - mean * mean);
    return PsdEstimate{.omega = static_cast<double>(p.bin) * bin_spacing(),
                       .value = mean,
                       .std_error = std::sqrt(var / (n - 1.0)),
                       .segments = segments_};
}

}  // namespace qfc
