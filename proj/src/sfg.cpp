#include "qfc/sfg.hpp"

#include <cmath>
#include <stdexcept>

#include "qfc/errors.hpp"

namespace qfc {

SfgParams::SfgParams(double gamma1, double gamma3, double rho1, double rho3, double chi_e)
    : gamma1(gamma1), gamma3(gamma3), rho1(rho1), rho3(rho3), chi_e(chi_e) {
    const bool finite = std::isfinite(gamma1) && std::isfinite(gamma3) &&
                        std::isfinite(rho1) && std::isfinite(rho3) && std::isfinite(chi_e);
    if (!finite || gamma1 <= 0.0 || gamma3 <= 0.0 || rho1 < 0.0 || rho3 < 0.0 ||
        chi_e < 0.0) {
        throw std::invalid_argument(
            "cavity parameters require gamma1, gamma3 > 0 and rho1, rho3, chi_e >= 0");
    }
}

SfgParams SfgParams::from_ratios(double gamma3_ratio, double rho1_ratio,
                                 double rho3_ratio, double pump_ratio) {
    return SfgParams(1.0, gamma3_ratio, rho1_ratio, rho3_ratio, pump_ratio);
}

bool SfgParams::small_loss_regime() const noexcept {
    return gamma1 <= 0.5 && gamma3 <= 0.5 && rho1 <= 0.5 && rho3 <= 0.5 && chi_e <= 0.5;
}

AnalysisFrequency AnalysisFrequency::from_omega_tau(double omega_tau) {
    if (!std::isfinite(omega_tau)) {
        throw std::invalid_argument("analysis frequency must be finite");
    }
    return AnalysisFrequency(omega_tau);
}

AnalysisFrequency AnalysisFrequency::from_normalized(double omega, double gamma1) {
    if (!std::isfinite(omega) || !(gamma1 > 0.0)) {
        throw std::invalid_argument("normalized frequency needs finite Omega and gamma1 > 0");
    }
    return AnalysisFrequency(omega * gamma1);
}

double TransferCoeffs::loss_sum() const noexcept {
    return (C * C + D * D + Gc * Gc + H * H + M * M + N * N) / (R * R);
}

double ChannelTransfer::unitarity_defect() const noexcept {
    const double total = std::norm(t_b1) + std::norm(t_c1) + std::norm(t_b3) + std::norm(t_c3);
    return std::abs(total - 1.0);
}

TransferCoeffs transfer_coeffs(const SfgParams& p, AnalysisFrequency f) {
    const double wt = f.omega_tau();
    const double wt2 = wt * wt;
    const double l1 = p.gamma1 + p.rho1;  // total single-pass loss at the signal
    const double l3 = p.gamma3 + p.rho3;  // and at the converted output
    const double k2 = p.chi_e * p.chi_e;

    TransferCoeffs c{};
    c.R = (l1 * l3 - wt2 + k2) * (l1 * l3 - wt2 + k2) + wt2 * (l1 + l3) * (l1 + l3);
    c.A = -2.0 * p.chi_e * std::sqrt(p.gamma1 * p.gamma3) * (l1 * l3 - wt2 + k2);
    c.B = -2.0 * p.chi_e * std::sqrt(p.gamma1 * p.gamma3) * wt * (l1 + l3);
    c.C = (l1 * (p.gamma3 - p.rho3) + wt2 - k2) * (l1 * l3 - wt2 + k2) +
          wt2 * (l1 + l3) * (p.gamma3 - p.rho3 - l1);
    c.D = wt * (l1 * (p.gamma3 - p.rho3) + wt2 - k2) * (l1 + l3) -
          wt * (l1 * l3 - wt2 + k2) * (p.gamma3 - p.rho3 - l1);
    c.Gc = 2.0 * std::sqrt(p.gamma3 * p.rho3) * ((l1 * l3 + k2) * l1 + wt2 * l3);
    c.H = 2.0 * std::sqrt(p.gamma3 * p.rho3) * wt * (l1 * l1 + wt2 - k2);
    c.M = -2.0 * p.chi_e * std::sqrt(p.rho1 * p.gamma3) * (l1 * l3 - wt2 + k2);
    c.N = -2.0 * p.chi_e * std::sqrt(p.rho1 * p.gamma3) * wt * (l1 + l3);
    return c;
}

ChannelTransfer channel_transfer(const SfgParams& p, AnalysisFrequency f) {
    const TransferCoeffs c = transfer_coeffs(p, f);
    return ChannelTransfer{
        .t_b1 = {c.A / c.R, -c.B / c.R},
        .t_c1 = {c.M / c.R, -c.N / c.R},
        .t_b3 = {c.C / c.R, -c.D / c.R},
        .t_c3 = {c.Gc / c.R, -c.H / c.R},
    };
}

double conversion_efficiency(const SfgParams& p, AnalysisFrequency f) {
    const TransferCoeffs c = transfer_coeffs(p, f);
    return 4.0 * p.chi_e * p.chi_e * p.gamma1 * p.gamma3 / c.R;
}

RotationAngle rotation_angle_phi(const SfgParams& p, AnalysisFrequency f) {
    if (p.chi_e == 0.0) {
        throw DegeneratePumpError("rotation angle undefined at chi_e = 0");
    }
    const TransferCoeffs c = transfer_coeffs(p, f);
    // atan2 of the raw pair; the common positive scale sqrt(R)/(2 chi_e
    // sqrt(gamma1 gamma3)) cancels.
    return RotationAngle(std::atan2(c.B, c.A));
}

}  // namespace qfc
