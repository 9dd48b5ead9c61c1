#pragma once

#include <Eigen/Dense>
#include <utility>

namespace qfc {

/// Two-mode squeezing strength of the entanglement source, r >= 0.
/// r = 0 means two uncorrelated vacuum modes.
class SqueezeFactor {
public:
    explicit SqueezeFactor(double r);
    double value() const noexcept { return r_; }

private:
    double r_;
};

/// Quadrature rotation angle, canonicalized into (-pi, pi].
class RotationAngle {
public:
    RotationAngle() noexcept : theta_(0.0) {}
    explicit RotationAngle(double radians);
    double radians() const noexcept { return theta_; }

private:
    double theta_;
};

/// Ordered quadratures (X_a1, Y_a1, X_a2, Y_a2) in shot-noise units
/// (vacuum variance = 1).
using QuadratureVector = Eigen::Vector4d;

/// 4x4 transform of the amplifier taking input quadratures
/// (X01, Y01, X02, Y02) to the entangled pair (X_a1, Y_a1, X_a2, Y_a2):
/// cosh r on the direct terms, +sinh r cross-coupling for X and -sinh r
/// for Y. Symplectic for every r.
Eigen::Matrix4d nopa_transform(SqueezeFactor r);

/// Variance of X_a1 - g*X_a2 (equal, by symmetry, to that of Y_a1 + g*Y_a2)
/// for unit-variance inputs: cosh(2r)(1 + g^2) - 2 g sinh(2r).
double epr_combination_variance(SqueezeFactor r, double gain);

/// Gain minimizing epr_combination_variance: tanh(2r). At the optimum the
/// combination variance is 1/cosh(2r).
double epr_optimal_gain(SqueezeFactor r);

/// Combination variance re-expressed per shot-noise of the total combination,
/// i.e. value / (1 + g^2). At g = 1 this is the halved raw variance.
double per_snl(double variance, double gain);

/// Rotate a quadrature pair by theta:
/// x' = x cos(theta) + y sin(theta), y' = -x sin(theta) + y cos(theta).
std::pair<double, double> rotate_quadratures(double x, double y, RotationAngle theta);

}  // namespace qfc
