#pragma once

#include <complex>

#include "qfc/quadrature.hpp"

namespace qfc {

/// Single-pass parameters of the sum-frequency cavity. gamma1/gamma3 are the
/// coupler transmissions for the signal and the converted output, rho1/rho3
/// the extra intracavity losses, chi_e the (undepleted) pump parameter.
/// All dimensionless; the linearized model assumes they are small.
struct SfgParams {
    double gamma1;
    double gamma3;
    double rho1;
    double rho3;
    double chi_e;

    SfgParams(double gamma1, double gamma3, double rho1, double rho3, double chi_e);

    /// Build from gamma1-normalized ratios with gamma1 = 1 (the convention
    /// used by all sweep interfaces).
    static SfgParams from_ratios(double gamma3_ratio, double rho1_ratio,
                                 double rho3_ratio, double pump_ratio);

    /// True when every single-pass coefficient is <= 0.5. The linearization
    /// is derived for small one-pass gain and losses; larger values are
    /// accepted but flagged. Applies to raw coefficients only: the transfer
    /// functions are invariant under a common rescaling of (gamma, rho,
    /// chi_e, omega tau), so ratio-normalized parameter sets say nothing
    /// about the physical one-pass scale.
    bool small_loss_regime() const noexcept;
};

/// Sideband analysis frequency, stored as the dimensionless product
/// omega*tau (cavity round-trip time tau never appears alone).
class AnalysisFrequency {
public:
    static AnalysisFrequency from_omega_tau(double omega_tau);
    /// From the gamma1-normalized frequency Omega = omega*tau/gamma1.
    static AnalysisFrequency from_normalized(double omega, double gamma1);

    double omega_tau() const noexcept { return omega_tau_; }
    double normalized(double gamma1) const noexcept { return omega_tau_ / gamma1; }

private:
    explicit AnalysisFrequency(double omega_tau) : omega_tau_(omega_tau) {}
    double omega_tau_;
};

/// The nine real coefficients of the cavity's quadrature transfer at one
/// analysis frequency. R is the common denominator; (A, B) weight the signal
/// input, (C, D) the reflected converted-port vacuum, (Gc, H) and (M, N) the
/// two loss channels. Gc is conventionally written G; renamed to avoid
/// colliding with the electronic gain.
struct TransferCoeffs {
    double R;
    double A;
    double B;
    double C;
    double D;
    double Gc;
    double H;
    double M;
    double N;

    /// (C^2 + D^2 + Gc^2 + H^2 + M^2 + N^2) / R^2 — the vacuum weight of all
    /// non-signal channels. Equals 1 - eta only through the sum rule, which
    /// is why it is computed explicitly.
    double loss_sum() const noexcept;
};

/// Complex amplitude-transfer coefficients from the four input channels
/// onto the converted output.
struct ChannelTransfer {
    std::complex<double> t_b1;  // signal input
    std::complex<double> t_c1;  // signal-loss vacuum
    std::complex<double> t_b3;  // converted-port input vacuum
    std::complex<double> t_c3;  // converted-loss vacuum

    /// | sum of |t|^2 - 1 |. Zero for a passive lossless-bookkeeping cavity.
    double unitarity_defect() const noexcept;
};

TransferCoeffs transfer_coeffs(const SfgParams& p, AnalysisFrequency f);

ChannelTransfer channel_transfer(const SfgParams& p, AnalysisFrequency f);

/// Conversion efficiency eta = 4 chi_e^2 gamma1 gamma3 / R = |t_b1|^2,
/// in [0, 1].
double conversion_efficiency(const SfgParams& p, AnalysisFrequency f);

/// Phase angle phi of the signal transfer, atan2(B, A). Throws
/// DegeneratePumpError when chi_e = 0 (no conversion, no phase).
RotationAngle rotation_angle_phi(const SfgParams& p, AnalysisFrequency f);

}  // namespace qfc
