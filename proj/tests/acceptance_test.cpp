// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line with the measured numbers. Exit code is the number
// of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qfc/correlation.hpp"
#include "qfc/langevin.hpp"
#include "qfc/oracle.hpp"
#include "qfc/sweeps.hpp"

using namespace qfc;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* pattern, auto... values) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, values...);
    return buf;
}

OperatingPoint standard_point(double r, double omega = 0.0) {
    return OperatingPoint{SfgParams::from_ratios(1.0, 0.1, 0.1, 1.0), SqueezeFactor(r),
                          AnalysisFrequency::from_normalized(omega, 1.0)};
}

// 1. The reference operating point keeps about 2 dB of correlation.
void criterion_1() {
    const CorrelationResult res = s_min(standard_point(0.6));
    const bool pass = std::abs(res.s_min - 0.6333) <= 0.005 &&
                      std::abs(res.s_min_db - (-1.98)) <= 0.05;
    report(1, pass,
           fmt("reference point s_min = %.6f (0.6333 +- 0.005), %.4f dB (-1.98 +- 0.05)",
               res.s_min, res.s_min_db));
}

// 2. The source correlation at unity gain is 5.21 dB below shot noise.
void criterion_2() {
    const double v = epr_combination_variance(SqueezeFactor(0.6), 1.0);
    const double db = to_decibel(per_snl(v, 1.0));
    const bool pass = std::abs(db - (-5.21)) <= 0.02;
    report(2, pass, fmt("per-SNL unity-gain variance = %.4f dB (-5.21 +- 0.02)", db));
}

// 3. The optimal-gain identity is exact across the squeeze range.
void criterion_3() {
    double worst = 0.0;
    for (int i = 0; i <= 30; ++i) {
        const double r = 0.1 * i;
        const double v = epr_combination_variance(SqueezeFactor(r), std::tanh(2.0 * r));
        worst = std::max(worst, std::abs(v - 1.0 / std::cosh(2.0 * r)));
    }
    report(3, worst < 1e-12,
           fmt("optimum variance vs 1/cosh(2r): max |diff| = %.2e (tol 1e-12)", worst));
}

// 4. A lossless matched cavity preserves the source correlation exactly.
void criterion_4() {
    double worst = 0.0;
    for (const double r : {0.5, 1.0, 2.0}) {
        const OperatingPoint op{SfgParams(1.0, 1.0, 0.0, 0.0, 1.0), SqueezeFactor(r),
                                AnalysisFrequency::from_omega_tau(0.0)};
        worst = std::max(worst, std::abs(s_min(op).s_min - 1.0 / std::cosh(2.0 * r)));
    }
    report(4, worst < 1e-12,
           fmt("lossless matched s_min vs 1/cosh(2r): max |diff| = %.2e (tol 1e-12)",
               worst));
}

// 5 and 6. Coefficient sum rule and full oracle equivalence on seeded draws.
void criteria_5_6() {
    VerifyOptions opts;
    opts.draws = 1000;
    opts.seed = 20240915;
    const std::vector<BatteryResult> batteries = run_verify_batteries(opts);

    const auto find = [&](const std::string& name) -> const BatteryResult& {
        for (const auto& b : batteries) {
            if (b.name == name) return b;
        }
        std::fprintf(stderr, "missing battery %s\n", name.c_str());
        std::exit(99);
    };

    const BatteryResult& sum_rule = find("sum-rule");
    report(5, sum_rule.pass,
           fmt("sum rule over 1000 draws: max relative error = %.2e (tol 1e-10)",
               sum_rule.max_error));

    const BatteryResult& transfer = find("oracle-transfer");
    const BatteryResult& corr = find("oracle-correlation");
    const BatteryResult& scan = find("scan-optimum-s");
    const bool pass = transfer.pass && corr.pass && scan.pass;
    report(6, pass,
           fmt("oracle equivalence: transfers %.2e (1e-10), variances %.2e (1e-10), "
               "scan optima %.2e (1e-6)",
               transfer.max_error, corr.max_error, scan.max_error));
}

// 7. Shape properties of the four parameter-sweep figures.
void criterion_7() {
    bool pass = true;
    std::string note;

    // spectra: minimized at zero frequency, even, ordered by squeezing
    const std::vector<double> rs{0.6, 1.0, 2.0};
    for (const double r : rs) {
        const double at_zero = s_min(standard_point(r, 0.0)).s_min;
        for (double omega = 0.05; omega <= 3.0 + 1e-9; omega += 0.05) {
            const double plus = s_min(standard_point(r, omega)).s_min;
            const double minus = s_min(standard_point(r, -omega)).s_min;
            if (plus < at_zero || std::abs(plus - minus) > 1e-12) pass = false;
        }
    }
    for (double omega = 0.0; omega <= 3.0 + 1e-9; omega += 0.05) {
        const double s06 = s_min(standard_point(0.6, omega)).s_min;
        const double s10 = s_min(standard_point(1.0, omega)).s_min;
        const double s20 = s_min(standard_point(2.0, omega)).s_min;
        if (!(s20 < s10 && s10 < s06)) pass = false;
    }
    note += pass ? "spectra ok" : "spectra violated";

    // pump sweeps: unimodal with argmin ordered by output transmission
    const CavityRatios base;
    const SweepAxis pump_axis{0.01, 3.0, 0.01};
    std::vector<PumpCurveSummary> summaries;
    const std::vector<double> gamma3s{0.6, 1.0, 1.4};
    const Table fig3 = pump_sweep_table(base, pump_axis, gamma3s, {}, 2.0, &summaries);
    bool unimodal = true;
    for (std::size_t c = 1; c <= 3; ++c) {
        int changes = 0;
        for (std::size_t i = 2; i < fig3.rows.size(); ++i) {
            const bool was_down = fig3.rows[i - 1][c] < fig3.rows[i - 2][c];
            const bool is_down = fig3.rows[i][c] < fig3.rows[i - 1][c];
            if (was_down != is_down) ++changes;
        }
        if (changes != 1) unimodal = false;
    }
    const bool ordered = summaries[0].argmin < summaries[1].argmin &&
                         summaries[1].argmin < summaries[2].argmin;
    if (!unimodal || !ordered) pass = false;
    note += fmt("; pump argmins %.2f < %.2f < %.2f %s", summaries[0].argmin,
                summaries[1].argmin, summaries[2].argmin,
                unimodal && ordered ? "ok" : "violated");

    // squeeze-mode pump sweep: curves ordered by r everywhere
    const Table fig4 = pump_sweep_table(base, pump_axis, {}, rs, 0.0);
    bool fig4_ordered = true;
    for (const auto& row : fig4.rows) {
        if (!(row[3] < row[2] && row[2] < row[1])) fig4_ordered = false;
    }
    if (!fig4_ordered) pass = false;
    note += fig4_ordered ? "; r-ordering ok" : "; r-ordering violated";

    // squeeze sweep: strict decrease toward the loss floor
    double asymptote = 0.0;
    const Table fig5 = squeeze_sweep_table(base, 0.0, SweepAxis{0.0, 3.0, 0.01}, &asymptote);
    bool decreasing = true;
    for (std::size_t i = 1; i < fig5.rows.size(); ++i) {
        if (!(fig5.rows[i][1] < fig5.rows[i - 1][1])) decreasing = false;
    }
    const bool asym_ok = std::abs(asymptote - 0.1810) <= 1e-4;
    if (!decreasing || !asym_ok) pass = false;
    note += fmt("; squeeze sweep %s, asymptote %.6f (0.1810 +- 1e-4)",
                decreasing ? "decreasing" : "not decreasing", asymptote);

    report(7, pass, note);
}

// 8. Inseparability verdicts across the tested grid.
void criterion_8() {
    bool pass = true;
    double worst_margin = 2.0;
    for (const double r : {0.3, 0.6, 1.0, 2.0}) {
        for (const double pump : {0.5, 1.0, 2.0}) {
            for (const double gamma3 : {0.6, 1.0, 1.4}) {
                for (const double omega : {0.0, 1.0}) {
                    const OperatingPoint op{SfgParams::from_ratios(gamma3, 0.1, 0.1, pump),
                                            SqueezeFactor(r),
                                            AnalysisFrequency::from_normalized(omega, 1.0)};
                    const DuanVerdict v = is_inseparable(op);
                    if (!v.inseparable || !(v.duan_sum < 2.0)) pass = false;
                    worst_margin = std::min(worst_margin, 2.0 - v.duan_sum);
                }
            }
        }
    }

    double worst_boundary = 0.0;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> loss(0.01, 0.5);
    std::uniform_real_distribution<double> pump(0.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const OperatingPoint op{
            SfgParams(loss(rng), loss(rng), loss(rng), loss(rng), pump(rng)),
            SqueezeFactor(0.0), AnalysisFrequency::from_omega_tau(0.0)};
        const DuanVerdict v = is_inseparable(op);
        worst_boundary = std::max(worst_boundary, std::abs(v.duan_sum - 2.0));
        if (v.inseparable) pass = false;
    }
    report(8, pass,
           fmt("entangled grid all below 2 (min margin %.3f); vacuum boundary |sum-2| "
               "<= %.2e",
               worst_margin, worst_boundary));
}

// 9. Stochastic reproduction of the analytic spectra at default settings.
void criterion_9() {
    const SfgParams params = SfgParams::from_ratios(1.0, 0.1, 0.1, 1.0);
    SimConfig cfg;  // defaults: dt 0.005, duration 2e5, seed 424242
    const std::vector<double> omegas{0.0, 0.5, 1.0, 1.5, 2.0};

    const MonteCarloResult mc = montecarlo_run(params, SqueezeFactor(0.6), cfg, omegas);
    bool agree = true;
    double worst_z = 0.0;
    for (const auto& row : mc.rows) {
        const double z = (row.simulated - row.analytic) / row.std_error;
        worst_z = std::max(worst_z, std::abs(z));
        if (!row.within(3.0)) agree = false;
    }

    // vacuum calibration: chi_e = 0 output must be flat at 1 across the band
    const SfgParams passive = SfgParams::from_ratios(1.0, 0.1, 0.1, 0.0);
    EprStreamSynth synth(SqueezeFactor(0.0), cfg.seed);
    SfgCavity cavity(passive, cfg.dt, cfg.seed + 1);
    WelchAccumulator acc(cfg.welch_segment, cfg.welch_overlap, cfg.dt);
    for (std::size_t i = 0; i < cfg.steps(); ++i) {
        const auto epr = synth.next();
        acc.push(cavity.step({epr[0], epr[1]}).real());
    }
    bool flat = true;
    double worst_dev = 0.0;
    for (double lo = 0.0; lo < 2.0 - 1e-9; lo += 0.4) {
        const double band = acc.band_average(lo, lo + 0.4);
        worst_dev = std::max(worst_dev, std::abs(band - 1.0));
        if (std::abs(band - 1.0) > 0.02) flat = false;
    }

    report(9, agree && flat,
           fmt("simulated vs analytic: worst |z| = %.2f (3 sigma); calibration bands "
               "within %.4f of 1 (tol 0.02)",
               worst_z, worst_dev));
}

}  // namespace

int main() {
    std::printf("acceptance suite (%s)\n", tool_version().c_str());
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criteria_5_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%s: %d criteria failed\n", failures == 0 ? "SUCCESS" : "FAILURE", failures);
    return failures;
}
