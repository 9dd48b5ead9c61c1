#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qfc/correlation.hpp"
#include "qfc/langevin.hpp"

// Sweep drivers behind the command-line front end. Everything here is pure
// given its arguments; file writing is left to the caller.

namespace qfc {

/// Closed interval grid start, start+step, ..., up to stop (inclusive within
/// half a step). step > 0 and start <= stop required.
struct SweepAxis {
    double start;
    double stop;
    double step;

    std::vector<double> grid() const;
};

/// gamma1-normalized cavity configuration shared by all commands. Defaults
/// are the reference configuration of the sweep figures.
struct CavityRatios {
    double gamma3 = 1.0;
    double rho1 = 0.1;
    double rho3 = 0.1;
    double pump = 1.0;

    SfgParams params() const { return SfgParams::from_ratios(gamma3, rho1, rho3, pump); }
    SfgParams params_with_pump(double pump_ratio) const {
        return SfgParams::from_ratios(gamma3, rho1, rho3, pump_ratio);
    }
};

/// Column-oriented numeric table with a CSV header.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Format a double with 12 significant digits (the fixed CSV precision).
std::string format_value(double v);
/// Comma-separated, header row, LF endings, 12 significant digits.
void write_csv(const Table& table, std::ostream& out);

/// s_min(Omega) columns for each squeeze factor; header
/// "omega,smin_r=<r1>,...".
Table spectrum_table(const CavityRatios& ratios, std::span<const double> r_values,
                     const SweepAxis& omega_axis);

struct PumpCurveSummary {
    std::string label;
    double argmin;
    double min;
};

/// s_min versus pump ratio at Omega = 0, one column per gamma3 ratio at
/// fixed r (transmission mode) or per r at fixed gamma3 (squeeze mode).
Table pump_sweep_table(const CavityRatios& ratios, const SweepAxis& pump_axis,
                       std::span<const double> gamma3_values,
                       std::span<const double> r_values, double squeeze,
                       std::vector<PumpCurveSummary>* summaries = nullptr);

/// s_min versus r at fixed cavity parameters and Omega; if asymptote is
/// non-null it receives the r -> infinity limit 1 - eta.
Table squeeze_sweep_table(const CavityRatios& ratios, double omega,
                          const SweepAxis& r_axis, double* asymptote = nullptr);

// ---------------------------------------------------------------------------
// Verification batteries (closed forms against the brute-force oracle).

struct BatteryResult {
    std::string name;
    double max_error;
    double tolerance;
    bool pass;
};

struct VerifyOptions {
    int draws = 1000;
    std::uint64_t seed = 20240915;
    /// Self-test hook: perturbation added to one transfer coefficient before
    /// the sum-rule check. Any nonzero value must make the battery fail.
    double injected_fault = 0.0;
};

std::vector<BatteryResult> run_verify_batteries(const VerifyOptions& opts);

// ---------------------------------------------------------------------------
// Monte Carlo reproduction of the analytic spectra.

struct MonteCarloRow {
    double omega;       // realized Welch bin
    double analytic;    // closed-form S at the realized bin
    double simulated;   // Welch estimate of the optimal combination
    double std_error;
    bool within(double n_sigma) const noexcept;
};

struct MonteCarloResult {
    std::vector<MonteCarloRow> rows;
    bool all_within(double n_sigma) const noexcept;
};

/// Integrate one trajectory and estimate the PSD of the optimal combination
/// at each requested frequency; (g, theta) are frozen per frequency at the
/// closed-form optimum of the realized bin. Optionally stream the trace to
/// trace_dump as CSV.
MonteCarloResult montecarlo_run(const SfgParams& p, SqueezeFactor r,
                                const SimConfig& cfg, std::span<const double> omegas,
                                std::ostream* trace_dump = nullptr);

// ---------------------------------------------------------------------------

/// Reproducibility record written next to every emitted dataset.
struct RunManifest {
    std::string tool_version;
    std::string subcommand;
    std::vector<std::string> argv;  // fully resolved; rerunning it reproduces the outputs
    std::map<std::string, std::string> parameters;  // resolved flag -> value
    std::optional<std::uint64_t> seed;
    std::string timestamp;  // ISO 8601 UTC
    std::vector<std::string> outputs;

    std::string to_json() const;
    void write(const std::string& path) const;
};

std::string tool_version();

}  // namespace qfc
