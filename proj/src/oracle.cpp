#include "qfc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "qfc/errors.hpp"

namespace qfc::oracle {

namespace detail {

Eigen::Matrix<std::complex<double>, 2, 4> solve_fluctuations(
    std::complex<double> d1, std::complex<double> d3, double chi_e,
    double coupling_b1, double coupling_c1, double coupling_b3, double coupling_c3) {
    using Mat24 = Eigen::Matrix<std::complex<double>, 2, 4>;
    Eigen::Matrix2cd lhs;
    lhs << d1, -chi_e,
           chi_e, d3;
    Mat24 rhs = Mat24::Zero();
    rhs(0, 0) = coupling_b1;
    rhs(0, 1) = coupling_c1;
    rhs(1, 2) = coupling_b3;
    rhs(1, 3) = coupling_c3;

    Eigen::FullPivLU<Eigen::Matrix2cd> lu(lhs);
    if (std::abs(lhs.determinant()) <= 1e-14) {
        throw NumericalError("fluctuation system is singular");
    }
    return lu.solve(rhs);
}

}  // namespace detail

ChannelTransfer solve_channel_transfer(const SfgParams& p, AnalysisFrequency f) {
    const std::complex<double> d1(p.gamma1 + p.rho1, f.omega_tau());
    const std::complex<double> d3(p.gamma3 + p.rho3, f.omega_tau());
    const auto beta = detail::solve_fluctuations(
        d1, d3, p.chi_e, std::sqrt(2.0 * p.gamma1), std::sqrt(2.0 * p.rho1),
        std::sqrt(2.0 * p.gamma3), std::sqrt(2.0 * p.rho3));

    // Output boundary condition: out = sqrt(2 gamma3) beta3 - b3_in.
    const double oc = std::sqrt(2.0 * p.gamma3);
    return ChannelTransfer{
        .t_b1 = oc * beta(1, 0),
        .t_c1 = oc * beta(1, 1),
        .t_b3 = oc * beta(1, 2) - 1.0,
        .t_c3 = oc * beta(1, 3),
    };
}

namespace {

// Quadrature response of a complex amplitude transfer t: the X output picks
// up Re(t) X_in - Im(t) Y_in, the Y output Im(t) X_in + Re(t) Y_in.
void add_channel_x(ResponseRow& row, std::complex<double> t, int ix, int iy) {
    row[ix] += t.real();
    row[iy] -= t.imag();
}

void add_channel_y(ResponseRow& row, std::complex<double> t, int ix, int iy) {
    row[ix] += t.imag();
    row[iy] += t.real();
}

struct A2Rows {
    ResponseRow x = ResponseRow::Zero();  // X_a2 over the basis
    ResponseRow y = ResponseRow::Zero();  // Y_a2 over the basis
};

A2Rows retained_beam_rows(SqueezeFactor r) {
    const double ch = std::cosh(r.value());
    const double sh = std::sinh(r.value());
    A2Rows rows;
    rows.x[0] = sh;
    rows.x[2] = ch;
    rows.y[1] = -sh;
    rows.y[3] = ch;
    return rows;
}

ResponseRow output_row(const SfgParams& p, SqueezeFactor r, AnalysisFrequency f,
                       Combination kind) {
    const ChannelTransfer t = solve_channel_transfer(p, f);
    const double ch = std::cosh(r.value());
    const double sh = std::sinh(r.value());

    ResponseRow row = ResponseRow::Zero();
    if (kind == Combination::amplitude_difference) {
        // X_out: the signal channel carries a1, so expand its quadratures
        // through the squeezing transform.
        row[0] += t.t_b1.real() * ch;
        row[2] += t.t_b1.real() * sh;
        row[1] -= t.t_b1.imag() * ch;
        row[3] += t.t_b1.imag() * sh;
        add_channel_x(row, t.t_c1, 4, 5);
        add_channel_x(row, t.t_b3, 6, 7);
        add_channel_x(row, t.t_c3, 8, 9);
    } else {
        row[0] += t.t_b1.imag() * ch;
        row[2] += t.t_b1.imag() * sh;
        row[1] += t.t_b1.real() * ch;
        row[3] -= t.t_b1.real() * sh;
        add_channel_y(row, t.t_c1, 4, 5);
        add_channel_y(row, t.t_b3, 6, 7);
        add_channel_y(row, t.t_c3, 8, 9);
    }
    return row;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

ResponseRow assemble_correlation_row(const SfgParams& p, SqueezeFactor r,
                                     AnalysisFrequency f, double gain,
                                     RotationAngle theta, Combination kind) {
    ResponseRow row = output_row(p, r, f, kind);
    const A2Rows a2 = retained_beam_rows(r);
    const double c = std::cos(theta.radians());
    const double s = std::sin(theta.radians());
    if (kind == Combination::amplitude_difference) {
        row -= gain * (c * a2.x + s * a2.y);  // X_a2 rotated by theta
    } else {
        row += gain * (-s * a2.x + c * a2.y);  // Y_a2 rotated by theta
    }
    return row;
}

ScanResult scan_optimum(const SfgParams& p, SqueezeFactor r, AnalysisFrequency f) {
    const ResponseRow u = output_row(p, r, f, Combination::amplitude_difference);
    const A2Rows a2 = retained_beam_rows(r);

    // S(g, theta) = ||u - g (cos(theta) v1 + sin(theta) v2)||^2 expands into
    // six dot products; the scan works on that exact quadratic form.
    const double uu = u.squaredNorm();
    const double uv1 = u.dot(a2.x);
    const double uv2 = u.dot(a2.y);
    const double v11 = a2.x.squaredNorm();
    const double v22 = a2.y.squaredNorm();
    const double v12 = a2.x.dot(a2.y);

    const auto value = [&](double g, double theta) {
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        const double quad = ct * ct * v11 + 2.0 * ct * st * v12 + st * st * v22;
        const double cross = ct * uv1 + st * uv2;
        return uu - 2.0 * g * cross + g * g * quad;
    };

    constexpr double pi = std::numbers::pi;
    const double theta_step = pi / 360.0;
    constexpr double g_step = 0.01;

    double best_g = 0.0, best_theta = 0.0, best_s = value(0.0, 0.0);
    for (int j = 1; j <= 720; ++j) {
        const double theta = -pi + j * theta_step;
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        const double quad = ct * ct * v11 + 2.0 * ct * st * v12 + st * st * v22;
        const double cross = ct * uv1 + st * uv2;
        for (int i = 0; i <= 200; ++i) {
            const double g = i * g_step;
            const double s = uu - 2.0 * g * cross + g * g * quad;
            if (s < best_s) {
                best_s = s;
                best_g = g;
                best_theta = theta;
            }
        }
    }

    // Refinement. At fixed theta the variance is an exact parabola in g, so
    // the g-optimized profile collapses the search to one dimension; theta is
    // refined by golden section with a re-centering window (the theta
    // landscape is nearly flat when the optimal gain is small, which can put
    // the coarse winner a long way from the true angle).
    const auto best_gain_at = [&](double theta) {
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        const double quad = ct * ct * v11 + 2.0 * ct * st * v12 + st * st * v22;
        const double cross = ct * uv1 + st * uv2;
        if (!(quad > 0.0)) return 0.0;
        return std::clamp(cross / quad, 0.0, 2.0);
    };
    const auto profile = [&](double theta) { return value(best_gain_at(theta), theta); };

    for (int round = 0; round < 4; ++round) {
        best_theta = golden_section(profile, best_theta - std::numbers::pi / 4.0,
                                    best_theta + std::numbers::pi / 4.0, 1e-11);
    }
    best_g = best_gain_at(best_theta);
    best_s = value(best_g, best_theta);

    const bool flat = best_g < 1e-6;
    return ScanResult{.gain = best_g,
                      .theta = RotationAngle(flat ? 0.0 : best_theta).radians(),
                      .s = best_s,
                      .flat_gain = flat};
}

}  // namespace qfc::oracle
