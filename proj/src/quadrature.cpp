#include "qfc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfc {

SqueezeFactor::SqueezeFactor(double r) : r_(r) {
    if (!std::isfinite(r) || r < 0.0) {
        throw std::invalid_argument("squeeze factor must be finite and >= 0");
    }
}

RotationAngle::RotationAngle(double radians) {
    if (!std::isfinite(radians)) {
        throw std::invalid_argument("rotation angle must be finite");
    }
    // remainder() lands in [-pi, pi]; fold -pi onto +pi for (-pi, pi].
    double t = std::remainder(radians, 2.0 * std::numbers::pi);
    if (t <= -std::numbers::pi) t = std::numbers::pi;
    if (t == 0.0) t = 0.0;  // normalize -0
    theta_ = t;
}

Eigen::Matrix4d nopa_transform(SqueezeFactor r) {
    const double ch = std::cosh(r.value());
    const double sh = std::sinh(r.value());
    Eigen::Matrix4d m;
    // rows: X_a1, Y_a1, X_a2, Y_a2 over (X01, Y01, X02, Y02)
    m << ch, 0.0, sh, 0.0,
         0.0, ch, 0.0, -sh,
         sh, 0.0, ch, 0.0,
         0.0, -sh, 0.0, ch;
    return m;
}

double epr_combination_variance(SqueezeFactor r, double gain) {
    if (!std::isfinite(gain)) {
        throw std::invalid_argument("gain must be finite");
    }
    const double c2 = std::cosh(2.0 * r.value());
    const double s2 = std::sinh(2.0 * r.value());
    return c2 * (1.0 + gain * gain) - 2.0 * gain * s2;
}

double epr_optimal_gain(SqueezeFactor r) {
    return std::tanh(2.0 * r.value());
}

double per_snl(double variance, double gain) {
    return variance / (1.0 + gain * gain);
}

std::pair<double, double> rotate_quadratures(double x, double y, RotationAngle theta) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw std::invalid_argument("quadratures must be finite");
    }
    const double c = std::cos(theta.radians());
    const double s = std::sin(theta.radians());
    return {x * c + y * s, -x * s + y * c};
}

}  // namespace qfc
