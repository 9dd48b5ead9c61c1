#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qfc/correlation.hpp"
#include "qfc/sfg.hpp"

// Brute-force reference path for every closed form in sfg.hpp and
// correlation.hpp. Built only from the intracavity equations of motion, the
// output boundary condition, the squeezing transform and the quadrature
// rotation — never from the coefficient formulas it is meant to check.

namespace qfc::oracle {

/// Real response of one output observable over the 10 independent
/// unit-variance input coordinates, ordered
///   (X01, Y01, X02, Y02, Xc1, Yc1, Xb3, Yb3, Xc3, Yc3).
/// Observable variance = row.squaredNorm().
using ResponseRow = Eigen::Matrix<double, 10, 1>;

enum class Combination {
    amplitude_difference,  // X_out - g X_a2^theta
    phase_sum,             // Y_out + g Y_a2^theta
};

namespace detail {
/// Response of the intracavity amplitudes (beta1, beta3) to unit excitation
/// of the four input channels (b1, c1, b3, c3), by direct LU solve of the
/// 2x2 frequency-domain system with diagonal entries d1, d3 and coupling
/// chi_e. Throws NumericalError when the system is singular.
Eigen::Matrix<std::complex<double>, 2, 4> solve_fluctuations(
    std::complex<double> d1, std::complex<double> d3, double chi_e,
    double coupling_b1, double coupling_c1, double coupling_b3, double coupling_c3);
}  // namespace detail

/// Channel transfer onto the converted output obtained by solving the
/// fluctuation equations and applying the output boundary condition.
ChannelTransfer solve_channel_transfer(const SfgParams& p, AnalysisFrequency f);

/// Response row of the chosen correlation combination.
ResponseRow assemble_correlation_row(const SfgParams& p, SqueezeFactor r,
                                     AnalysisFrequency f, double gain,
                                     RotationAngle theta,
                                     Combination kind = Combination::amplitude_difference);

struct ScanResult {
    double gain;
    double theta;
    double s;
    bool flat_gain;  // optimum at g ~ 0; theta direction is flat
};

/// Locate the (g, theta) optimum of the row-assembled variance by coarse grid
/// (g in [0,2] step 0.01, theta step pi/360) plus golden-section refinement.
ScanResult scan_optimum(const SfgParams& p, SqueezeFactor r, AnalysisFrequency f);

}  // namespace qfc::oracle
