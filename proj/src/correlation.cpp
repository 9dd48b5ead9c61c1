#include "qfc/correlation.hpp"

#include <cmath>
#include <stdexcept>

namespace qfc {

double correlation_variance(const OperatingPoint& op, double gain, RotationAngle theta) {
    if (!std::isfinite(gain)) {
        throw std::invalid_argument("gain must be finite");
    }
    const TransferCoeffs tc = transfer_coeffs(op.params, op.freq);
    const double loss = tc.loss_sum();
    const double c2 = std::cosh(2.0 * op.squeeze.value());
    const double s2 = std::sinh(2.0 * op.squeeze.value());
    if (op.params.chi_e == 0.0) {
        return gain * gain * c2 + loss;  // no conversion: only the retained beam and vacuum
    }
    const double eta = conversion_efficiency(op.params, op.freq);
    const double phi = rotation_angle_phi(op.params, op.freq).radians();
    return eta * c2 - 2.0 * std::sqrt(eta) * gain * std::cos(phi + theta.radians()) * s2 +
           gain * gain * c2 + loss;
}

double optimal_gain(const OperatingPoint& op, RotationAngle theta) {
    if (op.params.chi_e == 0.0) return 0.0;
    const double eta = conversion_efficiency(op.params, op.freq);
    const double phi = rotation_angle_phi(op.params, op.freq).radians();
    return std::sqrt(eta) * std::cos(phi + theta.radians()) *
           std::tanh(2.0 * op.squeeze.value());
}

CorrelationResult s_min(const OperatingPoint& op) {
    const TransferCoeffs tc = transfer_coeffs(op.params, op.freq);
    const double loss = tc.loss_sum();
    const double c2 = std::cosh(2.0 * op.squeeze.value());

    if (op.params.chi_e == 0.0) {
        // Vacuum at the output; the best gain is zero and theta is moot.
        const double s = loss;
        return CorrelationResult{.s_min = s,
                                 .g_opt = 0.0,
                                 .theta_opt = RotationAngle(0.0),
                                 .eta = 0.0,
                                 .duan_sum = 2.0 * s,
                                 .s_min_db = to_decibel(s),
                                 .degenerate_pump = true};
    }

    const double eta = conversion_efficiency(op.params, op.freq);
    const double phi = rotation_angle_phi(op.params, op.freq).radians();
    const double s = eta / c2 + loss;
    return CorrelationResult{.s_min = s,
                             .g_opt = std::sqrt(eta) * std::tanh(2.0 * op.squeeze.value()),
                             .theta_opt = RotationAngle(-phi),
                             .eta = eta,
                             .duan_sum = 2.0 * s,
                             .s_min_db = to_decibel(s),
                             .degenerate_pump = false};
}

DuanVerdict is_inseparable(const OperatingPoint& op) {
    const double sum = s_min(op).duan_sum;
    return DuanVerdict{.inseparable = sum < 2.0 * (1.0 - 1e-12), .duan_sum = sum};
}

double to_decibel(double s) {
    if (!std::isfinite(s) || s <= 0.0) {
        throw std::domain_error("decibel conversion requires a positive value");
    }
    return 10.0 * std::log10(s);
}

}  // namespace qfc
