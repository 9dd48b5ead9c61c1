// End-to-end tests of the command-line tool: output formats, exit codes,
// config precedence, and manifest-driven reproducibility.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct CmdResult {
    int exit_code;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QFC_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
    const int status = pclose(pipe);
    return CmdResult{WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::istringstream ss(s);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("point prints the reference result") {
    const CmdResult res =
        run_cli("point --gamma3 1 --rho1 0.1 --rho3 0.1 --pump 1 --r 0.6 --omega 0");
    CHECK(res.exit_code == 0);
    CHECK(contains(res.out, "s_min       = 0.633329501262"));
    CHECK(contains(res.out, "s_min_db    = -1.98370281534"));
    CHECK(contains(res.out, "g_opt       = 0.754438558382"));
    CHECK(contains(res.out, "inseparable = true"));
}

TEST_CASE("point without squeezing sits on the separability boundary") {
    const CmdResult res = run_cli("point --r 0");
    CHECK(res.exit_code == 0);
    CHECK(contains(res.out, "s_min       = 1\n"));
    CHECK(contains(res.out, "inseparable = false"));
}

TEST_CASE("lossless matched point preserves the source correlation") {
    const CmdResult res =
        run_cli("point --rho1 0 --rho3 0 --pump 1 --gamma3 1 --omega 0 --r 1");
    CHECK(res.exit_code == 0);
    CHECK(contains(res.out, "s_min       = 0.265802228834"));
}

TEST_CASE("point json output is machine readable") {
    const CmdResult res = run_cli("point --r 0.6 --json");
    CHECK(res.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(res.out);
    CHECK(j["s_min"].get<double>() == doctest::Approx(0.6333295012618126).epsilon(1e-12));
    CHECK(j["inseparable"].get<bool>());
    CHECK_FALSE(j["degenerate_pump"].get<bool>());
}

TEST_CASE("point CSV row matches the printed values") {
    const CmdResult res = run_cli("point --r 0.6 --out point_row.csv");
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(slurp("point_row.csv"));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] ==
          "gamma3,rho1,rho3,pump,r,omega,s_min,s_min_db,g_opt,theta_opt,eta,duan_sum,"
          "inseparable");
    const auto cells = split_csv(lines[1]);
    REQUIRE(cells.size() == 13);
    CHECK(cells[6] == "0.633329501262");
    CHECK(cells[12] == "1");
    std::remove("point_row.csv");
    std::remove("point_row.csv.manifest.json");
}

TEST_CASE("spectrum emits ordered columns consistent with point") {
    const std::string cmd = "spectrum --r-list 0.6,1,2 --start 0 --stop 0.2 --step 0.1 "
                            "--out spec_a.csv";
    CHECK(run_cli(cmd).exit_code == 0);
    const std::string first = slurp("spec_a.csv");
    const auto lines = split_lines(first);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "omega,smin_r=0.6,smin_r=1,smin_r=2");

    // stronger squeezing preserves more correlation at every frequency
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 4);
        CHECK(std::stod(cells[1]) > std::stod(cells[2]));
        CHECK(std::stod(cells[2]) > std::stod(cells[3]));
    }

    // the Omega = 0 row repeats the standalone point values digit for digit
    const CmdResult point = run_cli("point --r 0.6 --omega 0");
    const auto zero_row = split_csv(lines[1]);
    CHECK(contains(point.out, "s_min       = " + zero_row[1]));

    // byte-identical on rerun
    CHECK(run_cli(cmd).exit_code == 0);
    CHECK(slurp("spec_a.csv") == first);
    std::remove("spec_a.csv");
    std::remove("spec_a.csv.manifest.json");
}

TEST_CASE("spectrum of an unsqueezed source is flat at one") {
    CHECK(run_cli("spectrum --r-list 0 --start 0 --stop 0.3 --step 0.1 --out spec_b.csv")
              .exit_code == 0);
    const auto lines = split_lines(slurp("spec_b.csv"));
    REQUIRE(lines.size() == 5);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        CHECK(split_csv(lines[i])[1] == "1");
    }
    std::remove("spec_b.csv");
    std::remove("spec_b.csv.manifest.json");
}

TEST_CASE("manifest rerun reproduces the dataset byte for byte") {
    CHECK(run_cli("spectrum --r-list 0.6,2 --start 0 --stop 0.1 --step 0.05 "
                  "--out spec_m.csv")
              .exit_code == 0);
    const std::string original = slurp("spec_m.csv");
    const nlohmann::json manifest = nlohmann::json::parse(slurp("spec_m.csv.manifest.json"));
    CHECK(manifest["outputs"][0] == "spec_m.csv");
    CHECK(manifest["tool_version"] == "qfc 0.1.0");

    std::string argv_line;
    for (const auto& a : manifest["argv"]) {
        argv_line += a.get<std::string>() + " ";
    }
    std::remove("spec_m.csv");
    CHECK(run_cli(argv_line).exit_code == 0);
    CHECK(slurp("spec_m.csv") == original);
    std::remove("spec_m.csv");
    std::remove("spec_m.csv.manifest.json");
}

TEST_CASE("pump sweep orders the optima by output transmission") {
    const CmdResult res = run_cli(
        "pump-sweep --r 2 --gamma3-list 0.6,1,1.4 --start 0.2 --stop 2.4 --step 0.02 "
        "--out pump_a.csv");
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(res.out);
    std::vector<double> argmins;
    for (const auto& line : lines) {
        if (line.rfind("curve smin_gamma3=", 0) == 0) {
            const auto pos = line.find("argmin pump = ");
            const auto end = line.find(",", pos);
            argmins.push_back(std::stod(line.substr(pos + 14, end - pos - 14)));
        }
    }
    REQUIRE(argmins.size() == 3);
    CHECK(argmins[0] < argmins[1]);
    CHECK(argmins[1] < argmins[2]);

    const auto header = split_csv(split_lines(slurp("pump_a.csv"))[0]);
    CHECK(header[0] == "pump");
    CHECK(header[1] == "smin_gamma3=0.6");
    std::remove("pump_a.csv");
    std::remove("pump_a.csv.manifest.json");
}

TEST_CASE("pump sweep accepts the degenerate origin") {
    CHECK(run_cli("pump-sweep --r 2 --gamma3-list 1 --start 0 --stop 0.1 --step 0.05 "
                  "--out pump_b.csv")
              .exit_code == 0);
    const auto lines = split_lines(slurp("pump_b.csv"));
    CHECK(split_csv(lines[1])[1] == "1");  // no pump, no correlation
    std::remove("pump_b.csv");
    std::remove("pump_b.csv.manifest.json");
}

TEST_CASE("pump sweep in squeeze mode orders curves by r") {
    CHECK(run_cli("pump-sweep --r-list 0.6,1,2 --gamma3 1 --start 1 --stop 1 --step 1 "
                  "--out pump_c.csv")
              .exit_code == 0);
    const auto lines = split_lines(slurp("pump_c.csv"));
    CHECK(lines[0] == "pump,smin_r=0.6,smin_r=1,smin_r=2");
    const auto row = split_csv(lines[1]);
    CHECK(row[1] == "0.633329501262");
    CHECK(std::stod(row[1]) > std::stod(row[2]));
    CHECK(std::stod(row[2]) > std::stod(row[3]));
    std::remove("pump_c.csv");
    std::remove("pump_c.csv.manifest.json");
}

TEST_CASE("squeeze sweep decreases toward the loss asymptote") {
    const CmdResult res =
        run_cli("squeeze-sweep --start 0 --stop 2.5 --step 0.25 --out squeeze_a.csv");
    CHECK(res.exit_code == 0);
    CHECK(contains(res.out, "large-r asymptote (1 - eta) = 0.181015949714"));
    const auto lines = split_lines(slurp("squeeze_a.csv"));
    REQUIRE(lines.size() == 12);
    CHECK(split_csv(lines[1])[1] == "1");
    double prev = 2.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const double v = std::stod(split_csv(lines[i])[1]);
        CHECK(v < prev);
        CHECK(v > 0.181015949714);
        prev = v;
    }
    std::remove("squeeze_a.csv");
    std::remove("squeeze_a.csv.manifest.json");
}

TEST_CASE("verify passes clean and fails under an injected fault") {
    const CmdResult ok = run_cli("verify --draws 40 --seed 5 --out verdict_a.json --json");
    CHECK(ok.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp("verdict_a.json"));
    CHECK(j["pass"].get<bool>());
    CHECK(j["batteries"].size() >= 8);
    for (const auto& b : j["batteries"]) {
        CHECK(b["pass"].get<bool>());
        CHECK(b["max_error"].get<double>() < b["tolerance"].get<double>());
    }
    // stdout --json mirrors the file
    CHECK(nlohmann::json::parse(ok.out)["pass"].get<bool>());

    const CmdResult bad =
        run_cli("verify --draws 40 --seed 5 --inject-fault 1e-6 --out verdict_b.json");
    CHECK(bad.exit_code == 2);
    CHECK_FALSE(nlohmann::json::parse(slurp("verdict_b.json"))["pass"].get<bool>());
    std::remove("verdict_a.json");
    std::remove("verdict_b.json");
}

TEST_CASE("verify is deterministic for a fixed seed") {
    const CmdResult a = run_cli("verify --draws 25 --seed 77 --out verdict_c.json --json");
    const CmdResult b = run_cli("verify --draws 25 --seed 77 --out verdict_c.json --json");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    std::remove("verdict_c.json");
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli("bogus-subcommand").exit_code == 1);
    CHECK(run_cli("point --no-such-flag").exit_code == 1);
    CHECK(run_cli("spectrum --start 3 --stop 1 --out x.csv").exit_code == 1);
    CHECK(run_cli("point --r -1").exit_code == 1);
    CHECK(run_cli("pump-sweep --gamma3-list 1 --r-list 1 --out x.csv").exit_code == 1);
}

TEST_CASE("config files feed defaults and flags override them") {
    {
        std::ofstream ini("cfg_a.ini");
        ini << "gamma3=1.4\nr=2\n";
    }
    const CmdResult from_ini = run_cli("point --config cfg_a.ini --json");
    CHECK(from_ini.exit_code == 0);
    const double s_ini = nlohmann::json::parse(from_ini.out)["s_min"].get<double>();

    {
        std::ofstream js("cfg_b.json");
        js << R"({"gamma3": 1.4, "r": 2, "spectrum": {"stop": 0.1, "step": 0.05}})";
    }
    const CmdResult from_json = run_cli("point --config cfg_b.json --json");
    CHECK(from_json.exit_code == 0);
    CHECK(nlohmann::json::parse(from_json.out)["s_min"].get<double>() ==
          doctest::Approx(s_ini).epsilon(1e-15));

    // nested section reaches subcommand options
    CHECK(run_cli("spectrum --config cfg_b.json --r-list 1 --out cfg_spec.csv").exit_code ==
          0);
    CHECK(split_lines(slurp("cfg_spec.csv")).size() == 4);  // header + rows 0, 0.05, 0.1

    // command line beats config
    const CmdResult overridden = run_cli("point --config cfg_a.ini --r 0.6 --gamma3 1 --json");
    CHECK(nlohmann::json::parse(overridden.out)["s_min"].get<double>() ==
          doctest::Approx(0.6333295012618126).epsilon(1e-12));

    std::remove("cfg_a.ini");
    std::remove("cfg_b.json");
    std::remove("cfg_spec.csv");
    std::remove("cfg_spec.csv.manifest.json");
}

TEST_CASE("small monte carlo run verifies and reproduces") {
    const std::string cmd =
        "montecarlo --duration 20000 --omegas 0,1 --seed 99 --out mc_a.csv "
        "--dump-trace mc_trace.csv";
    const CmdResult res = run_cli(cmd);
    CHECK(res.exit_code == 0);
    CHECK(contains(res.out, "montecarlo: all frequencies agree"));

    const auto lines = split_lines(slurp("mc_a.csv"));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "omega,analytic_s,simulated_psd,std_error");
    CHECK(split_csv(lines[1])[1] == "0.633329501262");

    CHECK(split_lines(slurp("mc_trace.csv"))[0] == "t,Xa2,Ya2,Xb3,Yb3");

    const std::string original = slurp("mc_a.csv");
    CHECK(run_cli(cmd).exit_code == 0);
    CHECK(slurp("mc_a.csv") == original);

    std::remove("mc_a.csv");
    std::remove("mc_a.csv.manifest.json");
    std::remove("mc_trace.csv");
}

TEST_CASE("monte carlo calibration run sits at vacuum") {
    const CmdResult res =
        run_cli("montecarlo --pump 0 --r 0 --duration 20000 --omegas 0,1,2 --seed 41 "
                "--out mc_cal.csv");
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(slurp("mc_cal.csv"));
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        CHECK(cells[1] == "1");  // analytic vacuum
        CHECK(std::stod(cells[2]) == doctest::Approx(1.0).epsilon(0.1));
    }
    std::remove("mc_cal.csv");
    std::remove("mc_cal.csv.manifest.json");
}

TEST_CASE("montecarlo rejects a configuration with too few segments") {
    CHECK(run_cli("montecarlo --duration 100 --omegas 0 --out mc_bad.csv").exit_code == 1);
}

TEST_CASE("montecarlo json mode emits parseable row verdicts") {
    const CmdResult res =
        run_cli("montecarlo --duration 20000 --omegas 0 --seed 99 --json --out mc_j.csv");
    CHECK(res.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(res.out);
    CHECK(j["pass"].get<bool>());
    REQUIRE(j["rows"].size() == 1);
    CHECK(j["rows"][0]["analytic_s"].get<double>() ==
          doctest::Approx(0.6333295012618126).epsilon(1e-12));
    CHECK(j["rows"][0]["pass"].get<bool>());
    std::remove("mc_j.csv");
    std::remove("mc_j.csv.manifest.json");
}
