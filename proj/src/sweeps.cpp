#include "qfc/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qfc/errors.hpp"
#include "qfc/oracle.hpp"

namespace qfc {

std::vector<double> SweepAxis::grid() const {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("sweep step must be positive");
    }
    if (!(start <= stop)) {
        throw std::invalid_argument("sweep start must not exceed stop");
    }
    std::vector<double> g;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5));
    g.reserve(count + 1);
    for (std::size_t i = 0; i <= count; ++i) {
        const double v = start + static_cast<double>(i) * step;
        if (v <= stop + 0.5 * step) g.push_back(v);
    }
    if (g.empty()) throw std::invalid_argument("sweep grid is empty");
    return g;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(const Table& table, std::ostream& out) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i > 0) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out << ',';
            out << format_value(row[i]);
        }
        out << '\n';
    }
}

namespace {

double smin_at(const SfgParams& p, double r, double omega) {
    const OperatingPoint op{p, SqueezeFactor(r),
                            AnalysisFrequency::from_normalized(omega, p.gamma1)};
    return s_min(op).s_min;
}

}  // namespace

Table spectrum_table(const CavityRatios& ratios, std::span<const double> r_values,
                     const SweepAxis& omega_axis) {
    if (r_values.empty()) throw std::invalid_argument("spectrum needs at least one r value");
    const SfgParams p = ratios.params();
    Table t;
    t.header.push_back("omega");
    for (const double r : r_values) t.header.push_back("smin_r=" + format_value(r));
    for (const double omega : omega_axis.grid()) {
        std::vector<double> row{omega};
        for (const double r : r_values) row.push_back(smin_at(p, r, omega));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table pump_sweep_table(const CavityRatios& ratios, const SweepAxis& pump_axis,
                       std::span<const double> gamma3_values,
                       std::span<const double> r_values, double squeeze,
                       std::vector<PumpCurveSummary>* summaries) {
    const bool by_gamma3 = !gamma3_values.empty();
    const bool by_r = !r_values.empty();
    if (by_gamma3 == by_r) {
        throw std::invalid_argument("pump sweep varies either gamma3 or r, exactly one");
    }

    Table t;
    t.header.push_back("pump");
    std::vector<std::string> labels;
    if (by_gamma3) {
        for (const double g3 : gamma3_values) labels.push_back("smin_gamma3=" + format_value(g3));
    } else {
        for (const double r : r_values) labels.push_back("smin_r=" + format_value(r));
    }
    t.header.insert(t.header.end(), labels.begin(), labels.end());

    const auto grid = pump_axis.grid();
    const std::size_t curves = labels.size();
    for (const double pump : grid) {
        std::vector<double> row{pump};
        for (std::size_t c = 0; c < curves; ++c) {
            CavityRatios rc = ratios;
            double r = squeeze;
            if (by_gamma3) {
                rc.gamma3 = gamma3_values[c];
            } else {
                r = r_values[c];
            }
            row.push_back(smin_at(rc.params_with_pump(pump), r, 0.0));
        }
        t.rows.push_back(std::move(row));
    }

    if (summaries != nullptr) {
        summaries->clear();
        for (std::size_t c = 0; c < curves; ++c) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < t.rows.size(); ++i) {
                if (t.rows[i][c + 1] < t.rows[best][c + 1]) best = i;
            }
            summaries->push_back(
                PumpCurveSummary{labels[c], t.rows[best][0], t.rows[best][c + 1]});
        }
    }
    return t;
}

Table squeeze_sweep_table(const CavityRatios& ratios, double omega,
                          const SweepAxis& r_axis, double* asymptote) {
    const SfgParams p = ratios.params();
    Table t;
    t.header = {"r", "smin"};
    for (const double r : r_axis.grid()) {
        t.rows.push_back({r, smin_at(p, r, omega)});
    }
    if (asymptote != nullptr) {
        // s_min -> loss weight as cosh(2r) grows without bound.
        *asymptote =
            1.0 - conversion_efficiency(p, AnalysisFrequency::from_normalized(omega, p.gamma1));
    }
    return t;
}

// ---------------------------------------------------------------------------

namespace {

struct Draw {
    SfgParams params;
    AnalysisFrequency freq;
    double r;
    double gain;
    double theta;
};

Draw random_draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> loss(0.01, 0.5);
    std::uniform_real_distribution<double> pump(0.0, 2.0);
    std::uniform_real_distribution<double> freq(-3.0, 3.0);
    std::uniform_real_distribution<double> squeeze(0.0, 3.0);
    std::uniform_real_distribution<double> gain(0.0, 2.0);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    const double g1 = loss(rng);
    const double g3 = loss(rng);
    const double r1 = loss(rng);
    const double r3 = loss(rng);
    const double k = pump(rng);
    const double wt = freq(rng);
    return Draw{SfgParams(g1, g3, r1, r3, k), AnalysisFrequency::from_omega_tau(wt),
                squeeze(rng), gain(rng), angle(rng)};
}

double angular_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

}  // namespace

std::vector<BatteryResult> run_verify_batteries(const VerifyOptions& opts) {
    if (opts.draws < 1) throw std::invalid_argument("verify needs at least one draw");

    double sum_rule = 0.0;
    double efficiency = 0.0;
    double transfer = 0.0;
    double unitarity = 0.0;
    double even = 0.0;
    double correlation = 0.0;
    double pair_equality = 0.0;
    double scan_s = 0.0;
    double scan_arg = 0.0;

    std::mt19937_64 rng(opts.seed);
    for (int i = 0; i < opts.draws; ++i) {
        const Draw d = random_draw(rng);
        TransferCoeffs tc = transfer_coeffs(d.params, d.freq);
        tc.Gc += opts.injected_fault;

        const double sq = tc.A * tc.A + tc.B * tc.B + tc.C * tc.C + tc.D * tc.D +
                          tc.Gc * tc.Gc + tc.H * tc.H + tc.M * tc.M + tc.N * tc.N;
        sum_rule = std::max(sum_rule, std::abs(sq - tc.R * tc.R) / (tc.R * tc.R));

        const double eta = conversion_efficiency(d.params, d.freq);
        efficiency = std::max(
            efficiency, std::abs(eta - (tc.A * tc.A + tc.B * tc.B) / (tc.R * tc.R)));

        const ChannelTransfer closed = channel_transfer(d.params, d.freq);
        const ChannelTransfer solved = oracle::solve_channel_transfer(d.params, d.freq);
        transfer = std::max({transfer, std::abs(closed.t_b1 - solved.t_b1),
                             std::abs(closed.t_c1 - solved.t_c1),
                             std::abs(closed.t_b3 - solved.t_b3),
                             std::abs(closed.t_c3 - solved.t_c3)});
        unitarity = std::max(unitarity, solved.unitarity_defect());
        efficiency = std::max(efficiency, std::abs(eta - std::norm(solved.t_b1)));

        const auto mirrored = AnalysisFrequency::from_omega_tau(-d.freq.omega_tau());
        const ChannelTransfer neg = channel_transfer(d.params, mirrored);
        even = std::max({even, std::abs(std::norm(closed.t_b1) - std::norm(neg.t_b1)),
                         std::abs(std::norm(closed.t_c1) - std::norm(neg.t_c1)),
                         std::abs(std::norm(closed.t_b3) - std::norm(neg.t_b3)),
                         std::abs(std::norm(closed.t_c3) - std::norm(neg.t_c3))});

        const OperatingPoint op{d.params, SqueezeFactor(d.r), d.freq};
        const RotationAngle theta(d.theta);
        const double s_closed = correlation_variance(op, d.gain, theta);
        const auto row_x = oracle::assemble_correlation_row(
            d.params, SqueezeFactor(d.r), d.freq, d.gain, theta,
            oracle::Combination::amplitude_difference);
        const auto row_y = oracle::assemble_correlation_row(
            d.params, SqueezeFactor(d.r), d.freq, d.gain, theta,
            oracle::Combination::phase_sum);
        correlation = std::max(correlation, std::abs(s_closed - row_x.squaredNorm()));
        pair_equality =
            std::max(pair_equality, std::abs(row_x.squaredNorm() - row_y.squaredNorm()));

        const CorrelationResult best = s_min(op);
        const auto scan = oracle::scan_optimum(d.params, SqueezeFactor(d.r), d.freq);
        scan_s = std::max(scan_s, std::abs(scan.s - best.s_min));
        if (!scan.flat_gain && !best.degenerate_pump) {
            scan_arg = std::max(scan_arg, std::abs(scan.gain - best.g_opt));
            scan_arg = std::max(
                scan_arg, angular_distance(scan.theta, best.theta_opt.radians()));
        }
    }

    const auto entry = [](std::string name, double err, double tol) {
        return BatteryResult{std::move(name), err, tol, err < tol};
    };
    return {
        entry("sum-rule", sum_rule, 1e-10),
        entry("efficiency-consistency", efficiency, 1e-10),
        entry("oracle-transfer", transfer, 1e-10),
        entry("unitarity", unitarity, 1e-10),
        entry("even-spectra", even, 1e-12),
        entry("oracle-correlation", correlation, 1e-10),
        entry("quadrature-pair-equality", pair_equality, 1e-12),
        entry("scan-optimum-s", scan_s, 1e-6),
        entry("scan-optimum-arg", scan_arg, 1e-3),
    };
}

// ---------------------------------------------------------------------------

bool MonteCarloRow::within(double n_sigma) const noexcept {
    return std::abs(simulated - analytic) <= n_sigma * std_error;
}

bool MonteCarloResult::all_within(double n_sigma) const noexcept {
    return std::all_of(rows.begin(), rows.end(),
                       [&](const MonteCarloRow& r) { return r.within(n_sigma); });
}

MonteCarloResult montecarlo_run(const SfgParams& p, SqueezeFactor r,
                                const SimConfig& cfg, std::span<const double> omegas,
                                std::ostream* trace_dump) {
    cfg.validate();
    if (omegas.empty()) throw std::invalid_argument("monte carlo needs at least one frequency");

    // Freeze (g, theta) per requested frequency at the closed-form optimum of
    // the realized Welch bin, so the comparison carries no gridding bias. The
    // theta phase acts on the retained channel per analysis sideband inside
    // the estimator.
    CombinationSpectrum acc(cfg.welch_segment, cfg.welch_overlap, cfg.dt);
    const double nyquist = std::numbers::pi / cfg.dt;
    std::vector<double> analytic;
    analytic.reserve(omegas.size());
    for (const double omega : omegas) {
        const double snapped =
            std::min(std::round(std::abs(omega) / acc.bin_spacing()) * acc.bin_spacing(),
                     nyquist);
        const OperatingPoint op{p, r, AnalysisFrequency::from_normalized(snapped, p.gamma1)};
        const CorrelationResult opt = s_min(op);
        acc.add_probe(snapped, opt.g_opt, opt.theta_opt.radians());
        analytic.push_back(opt.s_min);
    }

    EprStreamSynth synth(r, cfg.seed);
    SfgCavity cavity(p, cfg.dt, cfg.seed + 1);
    const std::size_t n = cfg.steps();
    char line[160];
    if (trace_dump != nullptr) *trace_dump << "t,Xa2,Ya2,Xb3,Yb3\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto epr = synth.next();
        const auto out = cavity.step({epr[0], epr[1]});
        acc.push(out.real(), epr[2]);
        if (trace_dump != nullptr) {
            std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%.12g\n",
                          static_cast<double>(i) * cfg.dt, epr[2], epr[3], out.real(),
                          out.imag());
            *trace_dump << line;
        }
    }

    MonteCarloResult result;
    for (std::size_t j = 0; j < omegas.size(); ++j) {
        const PsdEstimate est = acc.probe(j);
        result.rows.push_back(
            MonteCarloRow{est.omega, analytic[j], est.value, est.std_error});
    }
    return result;
}

// ---------------------------------------------------------------------------

std::string tool_version() { return "qfc 0.1.0"; }

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["subcommand"] = subcommand;
    j["argv"] = argv;
    if (seed.has_value()) j["seed"] = *seed;
    j["parameters"] = parameters;
    j["timestamp"] = timestamp;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << to_json();
}

}  // namespace qfc
