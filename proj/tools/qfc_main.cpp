// Command-line front end: single-point evaluation, figure-reproducing sweeps,
// verification batteries, Monte Carlo runs. Emits CSV datasets plus a
// reproducibility manifest per output file.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qfc/correlation.hpp"
#include "qfc/errors.hpp"
#include "qfc/sweeps.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitNumerical = 3;

// Shortest round-tripping decimal form, for manifest argv values.
std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Accepts either flat key=value text (with optional [subcommand] sections or
// dotted keys) or the equivalent JSON object.
class FlexibleConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                          std::string prefix) const override {
        return CLI::ConfigINI{}.to_config(app, default_also, write_description, prefix);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::string content((std::istreambuf_iterator<char>(input)),
                            std::istreambuf_iterator<char>());
        const auto first = content.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && content[first] == '{') {
            std::vector<CLI::ConfigItem> items;
            walk(nlohmann::json::parse(content), {}, items);
            return items;
        }
        std::istringstream stream(content);
        return CLI::ConfigINI{}.from_config(stream);
    }

private:
    static void walk(const nlohmann::json& node, std::vector<std::string> parents,
                     std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : node.items()) {
            if (value.is_object()) {
                auto deeper = parents;
                deeper.push_back(key);
                walk(value, deeper, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& element : value) item.inputs.push_back(scalar(element));
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }
    static std::string scalar(const nlohmann::json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    }
};

struct GlobalArgs {
    qfc::CavityRatios ratios;
    double r = 0.6;
    double omega = 0.0;
    std::string out;
    std::uint64_t seed = 424242;
    bool json = false;

    qfc::OperatingPoint point() const {
        const qfc::SfgParams p = ratios.params();
        return qfc::OperatingPoint{p, qfc::SqueezeFactor(r),
                                   qfc::AnalysisFrequency::from_normalized(omega, p.gamma1)};
    }

    std::vector<std::string> argv_prefix(const std::string& subcommand) const {
        return {subcommand,
                "--gamma3", shortest(ratios.gamma3),
                "--rho1",   shortest(ratios.rho1),
                "--rho3",   shortest(ratios.rho3),
                "--pump",   shortest(ratios.pump),
                "--r",      shortest(r),
                "--omega",  shortest(omega),
                "--seed",   std::to_string(seed)};
    }
};

void add_global_options(CLI::App& app, GlobalArgs& g) {
    app.add_option("--gamma3", g.ratios.gamma3, "Output coupler transmission gamma3/gamma1")
        ->capture_default_str();
    app.add_option("--rho1", g.ratios.rho1, "Signal intracavity loss rho1/gamma1")
        ->capture_default_str();
    app.add_option("--rho3", g.ratios.rho3, "Converted-beam intracavity loss rho3/gamma1")
        ->capture_default_str();
    app.add_option("--pump", g.ratios.pump, "Pump parameter chiE/gamma1")
        ->capture_default_str();
    app.add_option("--r", g.r, "Initial squeezing factor")->capture_default_str();
    app.add_option("--omega", g.omega, "Normalized analysis frequency Omega")
        ->capture_default_str();
    app.add_option("--out", g.out, "Output file (CSV or JSON, command dependent)");
    app.add_option("--seed", g.seed, "Seed for stochastic commands")->capture_default_str();
    app.add_flag("--json", g.json, "Print machine-readable JSON to stdout");
}

qfc::RunManifest make_manifest(const GlobalArgs& g, const std::string& subcommand,
                               std::vector<std::string> argv,
                               std::vector<std::string> outputs, bool stochastic) {
    qfc::RunManifest m;
    m.tool_version = qfc::tool_version();
    m.subcommand = subcommand;
    m.argv = std::move(argv);
    for (std::size_t i = 1; i + 1 < m.argv.size(); i += 2) {
        m.parameters[m.argv[i].substr(2)] = m.argv[i + 1];
    }
    if (stochastic) m.seed = g.seed;
    m.timestamp = iso_timestamp();
    m.outputs = std::move(outputs);
    return m;
}

void write_table(const qfc::Table& table, const GlobalArgs& g,
                 const qfc::RunManifest& manifest) {
    if (g.out.empty()) {
        qfc::write_csv(table, std::cout);
        return;
    }
    std::ofstream file(g.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + g.out);
    qfc::write_csv(table, file);
    qfc::RunManifest m = manifest;
    m.write(g.out + ".manifest.json");
    std::cerr << "wrote " << g.out << " and " << g.out << ".manifest.json\n";
}

// ---------------------------------------------------------------------------

int cmd_point(const GlobalArgs& g) {
    const qfc::OperatingPoint op = g.point();
    const qfc::CorrelationResult res = qfc::s_min(op);
    const bool inseparable = res.duan_sum < 2.0;

    if (g.json) {
        nlohmann::json j;
        j["s_min"] = res.s_min;
        j["s_min_db"] = res.s_min_db;
        j["g_opt"] = res.g_opt;
        j["theta_opt"] = res.theta_opt.radians();
        j["eta"] = res.eta;
        j["duan_sum"] = res.duan_sum;
        j["inseparable"] = inseparable;
        j["degenerate_pump"] = res.degenerate_pump;
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("s_min       = %s\n", qfc::format_value(res.s_min).c_str());
        std::printf("s_min_db    = %s\n", qfc::format_value(res.s_min_db).c_str());
        std::printf("g_opt       = %s\n", qfc::format_value(res.g_opt).c_str());
        std::printf("theta_opt   = %s\n", qfc::format_value(res.theta_opt.radians()).c_str());
        std::printf("eta         = %s\n", qfc::format_value(res.eta).c_str());
        std::printf("duan_sum    = %s\n", qfc::format_value(res.duan_sum).c_str());
        std::printf("inseparable = %s\n", inseparable ? "true" : "false");
        if (res.degenerate_pump) std::printf("degenerate_pump = true\n");
    }

    if (!g.out.empty()) {
        qfc::Table t;
        t.header = {"gamma3", "rho1",      "rho3",  "pump",      "r",
                    "omega",  "s_min",     "s_min_db", "g_opt", "theta_opt",
                    "eta",    "duan_sum",  "inseparable"};
        t.rows.push_back({g.ratios.gamma3, g.ratios.rho1, g.ratios.rho3, g.ratios.pump, g.r,
                          g.omega, res.s_min, res.s_min_db, res.g_opt,
                          res.theta_opt.radians(), res.eta, res.duan_sum,
                          inseparable ? 1.0 : 0.0});
        std::ofstream file(g.out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file: " + g.out);
        qfc::write_csv(t, file);
        make_manifest(g, "point", g.argv_prefix("point"), {g.out}, false)
            .write(g.out + ".manifest.json");
    }
    return 0;
}

int cmd_spectrum(const GlobalArgs& g, const std::vector<double>& r_list,
                 const qfc::SweepAxis& axis) {
    const qfc::Table t = qfc::spectrum_table(g.ratios, r_list, axis);
    auto argv = g.argv_prefix("spectrum");
    std::string rs;
    for (std::size_t i = 0; i < r_list.size(); ++i) rs += (i ? "," : "") + shortest(r_list[i]);
    argv.insert(argv.end(), {"--r-list", rs, "--start", shortest(axis.start), "--stop",
                             shortest(axis.stop), "--step", shortest(axis.step)});
    if (!g.out.empty()) argv.insert(argv.end(), {"--out", g.out});
    write_table(t, g, make_manifest(g, "spectrum", argv, {g.out}, false));
    return 0;
}

int cmd_pump_sweep(const GlobalArgs& g, std::vector<double> gamma3_list,
                   const std::vector<double>& r_list, const qfc::SweepAxis& axis) {
    if (gamma3_list.empty() && r_list.empty()) gamma3_list = {0.6, 1.0, 1.4};
    std::vector<qfc::PumpCurveSummary> summaries;
    const qfc::Table t =
        qfc::pump_sweep_table(g.ratios, axis, gamma3_list, r_list, g.r, &summaries);

    auto argv = g.argv_prefix("pump-sweep");
    const auto join = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + shortest(v[i]);
        return s;
    };
    if (!gamma3_list.empty()) argv.insert(argv.end(), {"--gamma3-list", join(gamma3_list)});
    if (!r_list.empty()) argv.insert(argv.end(), {"--r-list", join(r_list)});
    argv.insert(argv.end(), {"--start", shortest(axis.start), "--stop", shortest(axis.stop),
                             "--step", shortest(axis.step)});
    if (!g.out.empty()) argv.insert(argv.end(), {"--out", g.out});
    write_table(t, g, make_manifest(g, "pump-sweep", argv, {g.out}, false));

    for (const auto& s : summaries) {
        std::printf("curve %s: argmin pump = %s, min s_min = %s\n", s.label.c_str(),
                    qfc::format_value(s.argmin).c_str(), qfc::format_value(s.min).c_str());
    }
    return 0;
}

int cmd_squeeze_sweep(const GlobalArgs& g, const qfc::SweepAxis& axis) {
    double asymptote = 0.0;
    const qfc::Table t = qfc::squeeze_sweep_table(g.ratios, g.omega, axis, &asymptote);
    auto argv = g.argv_prefix("squeeze-sweep");
    argv.insert(argv.end(), {"--start", shortest(axis.start), "--stop", shortest(axis.stop),
                             "--step", shortest(axis.step)});
    if (!g.out.empty()) argv.insert(argv.end(), {"--out", g.out});
    write_table(t, g, make_manifest(g, "squeeze-sweep", argv, {g.out}, false));
    std::printf("large-r asymptote (1 - eta) = %s\n", qfc::format_value(asymptote).c_str());
    return 0;
}

int cmd_verify(const GlobalArgs& g, int draws, double injected_fault) {
    qfc::VerifyOptions opts;
    opts.draws = draws;
    opts.seed = g.seed;
    opts.injected_fault = injected_fault;
    const std::vector<qfc::BatteryResult> results = qfc::run_verify_batteries(opts);

    bool all_pass = true;
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& b : results) {
        all_pass = all_pass && b.pass;
        if (!g.json) {
            std::printf("%-26s max_error=%.3e tolerance=%.0e %s\n", b.name.c_str(),
                        b.max_error, b.tolerance, b.pass ? "PASS" : "FAIL");
        }
        verdicts.push_back({{"battery", b.name},
                            {"max_error", b.max_error},
                            {"tolerance", b.tolerance},
                            {"pass", b.pass}});
    }

    nlohmann::json j;
    j["tool_version"] = qfc::tool_version();
    j["timestamp"] = iso_timestamp();
    j["draws"] = draws;
    j["seed"] = g.seed;
    if (injected_fault != 0.0) j["injected_fault"] = injected_fault;
    j["batteries"] = verdicts;
    j["pass"] = all_pass;

    const std::string path = g.out.empty() ? "verify_verdict.json" : g.out;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << j.dump(2) << "\n";
    if (g.json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("%s (verdict written to %s)\n",
                    all_pass ? "all batteries pass" : "FAILURE", path.c_str());
    }
    return all_pass ? 0 : kExitVerification;
}

int cmd_montecarlo(const GlobalArgs& g, const qfc::SimConfig& cfg,
                   const std::vector<double>& omegas, const std::string& dump_path) {
    const qfc::SfgParams p = g.ratios.params();
    if (!cfg.stability_advisory(p)) {
        std::cerr << "note: dt violates the stability advisory dt * loss rate < 0.1\n";
    }

    std::ofstream dump;
    std::ostream* dump_stream = nullptr;
    if (!dump_path.empty()) {
        dump.open(dump_path, std::ios::binary);
        if (!dump) throw std::runtime_error("cannot open trace dump: " + dump_path);
        dump_stream = &dump;
    }

    const qfc::MonteCarloResult result =
        qfc::montecarlo_run(p, qfc::SqueezeFactor(g.r), cfg, omegas, dump_stream);

    qfc::Table t;
    t.header = {"omega", "analytic_s", "simulated_psd", "std_error"};
    for (const auto& row : result.rows) {
        t.rows.push_back({row.omega, row.analytic, row.simulated, row.std_error});
    }

    auto argv = g.argv_prefix("montecarlo");
    std::string os;
    for (std::size_t i = 0; i < omegas.size(); ++i) os += (i ? "," : "") + shortest(omegas[i]);
    argv.insert(argv.end(),
                {"--omegas", os, "--dt", shortest(cfg.dt), "--duration",
                 shortest(cfg.duration), "--segment", std::to_string(cfg.welch_segment),
                 "--overlap", shortest(cfg.welch_overlap)});
    if (!g.out.empty()) argv.insert(argv.end(), {"--out", g.out});
    std::vector<std::string> outputs{g.out};
    if (!dump_path.empty()) outputs.push_back(dump_path);
    write_table(t, g, make_manifest(g, "montecarlo", argv, outputs, true));

    bool all = true;
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : result.rows) {
        const bool ok = row.within(3.0);
        all = all && ok;
        if (g.json) {
            rows_json.push_back({{"omega", row.omega},
                                 {"analytic_s", row.analytic},
                                 {"simulated_psd", row.simulated},
                                 {"std_error", row.std_error},
                                 {"pass", ok}});
        } else {
            std::printf("Omega=%-8s analytic=%.6f simulated=%.6f +- %.6f  %s\n",
                        qfc::format_value(row.omega).c_str(), row.analytic, row.simulated,
                        row.std_error, ok ? "PASS" : "FAIL");
        }
    }
    if (g.json) {
        std::cout << nlohmann::json{{"rows", rows_json}, {"pass", all}}.dump(2) << "\n";
    } else {
        std::printf("montecarlo: %s (3 sigma per frequency)\n",
                    all ? "all frequencies agree" : "DISAGREEMENT");
    }
    return all ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EPR correlation survival through intracavity sum-frequency conversion"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", qfc::tool_version());
    app.set_config("--config", "", "Config file (key=value or JSON); flags take precedence");
    app.config_formatter(std::make_shared<FlexibleConfig>());

    GlobalArgs g;
    add_global_options(app, g);

    auto* point = app.add_subcommand("point", "Evaluate one operating point");

    std::vector<double> spectrum_r{0.6, 1.0, 2.0};
    qfc::SweepAxis spectrum_axis{0.0, 3.0, 0.01};
    auto* spectrum = app.add_subcommand("spectrum", "s_min versus Omega, one column per r");
    spectrum->add_option("--r-list", spectrum_r, "Squeeze factors, one column each")
        ->delimiter(',')
        ->capture_default_str();
    spectrum->add_option("--start", spectrum_axis.start, "Omega start")->capture_default_str();
    spectrum->add_option("--stop", spectrum_axis.stop, "Omega stop")->capture_default_str();
    spectrum->add_option("--step", spectrum_axis.step, "Omega step")->capture_default_str();

    std::vector<double> pump_gamma3s;
    std::vector<double> pump_rs;
    qfc::SweepAxis pump_axis{0.01, 3.0, 0.01};
    auto* pump = app.add_subcommand(
        "pump-sweep", "s_min at Omega=0 versus pump ratio; vary gamma3 (fixed r) or r");
    pump->add_option("--gamma3-list", pump_gamma3s, "Curve per gamma3 ratio (fixed --r)")
        ->delimiter(',');
    pump->add_option("--r-list", pump_rs, "Curve per squeeze factor (fixed --gamma3)")
        ->delimiter(',');
    pump->add_option("--start", pump_axis.start, "Pump start")->capture_default_str();
    pump->add_option("--stop", pump_axis.stop, "Pump stop")->capture_default_str();
    pump->add_option("--step", pump_axis.step, "Pump step")->capture_default_str();

    qfc::SweepAxis squeeze_axis{0.0, 3.0, 0.01};
    auto* squeeze = app.add_subcommand("squeeze-sweep", "s_min versus squeeze factor r");
    squeeze->add_option("--start", squeeze_axis.start, "r start")->capture_default_str();
    squeeze->add_option("--stop", squeeze_axis.stop, "r stop")->capture_default_str();
    squeeze->add_option("--step", squeeze_axis.step, "r step")->capture_default_str();

    int verify_draws = 1000;
    double injected_fault = 0.0;
    auto* verify = app.add_subcommand("verify", "Closed forms against the brute-force oracle");
    verify->add_option("--draws", verify_draws, "Random parameter draws")
        ->capture_default_str();
    verify
        ->add_option("--inject-fault", injected_fault,
                     "Self-test: perturb one coefficient; verification must fail")
        ->capture_default_str();

    qfc::SimConfig sim;
    std::vector<double> mc_omegas{0.0, 0.5, 1.0, 1.5, 2.0};
    std::string dump_path;
    auto* mc = app.add_subcommand("montecarlo",
                                  "Stochastic integration against the analytic spectrum");
    mc->add_option("--dt", sim.dt, "Time step (tau/gamma1 units)")->capture_default_str();
    mc->add_option("--duration", sim.duration, "Total normalized time")->capture_default_str();
    mc->add_option("--segment", sim.welch_segment, "Welch segment length")
        ->capture_default_str();
    mc->add_option("--overlap", sim.welch_overlap, "Welch overlap fraction")
        ->capture_default_str();
    mc->add_option("--omegas", mc_omegas, "Frequencies to verify")->delimiter(',')
        ->capture_default_str();
    mc->add_option("--dump-trace", dump_path, "Stream the raw trace as CSV");

    try {
        app.parse(argc, argv);
        sim.seed = g.seed;

        if (point->parsed()) return cmd_point(g);
        if (spectrum->parsed()) return cmd_spectrum(g, spectrum_r, spectrum_axis);
        if (pump->parsed()) return cmd_pump_sweep(g, pump_gamma3s, pump_rs, pump_axis);
        if (squeeze->parsed()) return cmd_squeeze_sweep(g, squeeze_axis);
        if (verify->parsed()) return cmd_verify(g, verify_draws, injected_fault);
        if (mc->parsed()) return cmd_montecarlo(g, sim, mc_omegas, dump_path);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const qfc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
