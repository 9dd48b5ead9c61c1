#pragma once

#include "qfc/quadrature.hpp"
#include "qfc/sfg.hpp"

namespace qfc {

/// One point of the analysis: cavity parameters, source squeezing, and the
/// sideband frequency.
struct OperatingPoint {
    SfgParams params;
    SqueezeFactor squeeze;
    AnalysisFrequency freq;
};

/// Optimized correlation between the converted beam and the retained beam.
/// duan_sum = 2*s_min since the amplitude-difference and phase-sum variances
/// coincide at the optimum.
struct CorrelationResult {
    double s_min;
    double g_opt;
    RotationAngle theta_opt;
    double eta;
    double duan_sum;
    double s_min_db;
    bool degenerate_pump;  // chi_e = 0: vacuum output, no correlation
};

struct DuanVerdict {
    bool inseparable;
    double duan_sum;
};

/// Correlation variance S(g, theta) of X_out - g*X_a2^theta (== that of
/// Y_out + g*Y_a2^theta):
///   eta cosh 2r - 2 sqrt(eta) g cos(phi+theta) sinh 2r + g^2 cosh 2r + loss
/// with the loss term taken from the explicit coefficient sum.
double correlation_variance(const OperatingPoint& op, double gain, RotationAngle theta);

/// Gain minimizing S at fixed theta: sqrt(eta) cos(phi+theta) tanh 2r.
double optimal_gain(const OperatingPoint& op, RotationAngle theta);

/// Joint optimum: theta = -phi, g = sqrt(eta) tanh 2r, giving
/// s_min = eta/cosh 2r + loss.
CorrelationResult s_min(const OperatingPoint& op);

/// Inseparability test on the converted pair: duan_sum < 2. Sums within
/// 1e-12 of the boundary count as separable; the boundary is the separable
/// vacuum and the computed sum carries rounding of that order.
DuanVerdict is_inseparable(const OperatingPoint& op);

/// 10*log10(s). Rejects non-positive input.
double to_decibel(double s);

}  // namespace qfc
