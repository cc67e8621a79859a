// test_cli.cpp — end-to-end checks of the oscidet executable
//
// The binary path and the shipped scenario directory arrive as compile
// definitions; every invocation runs through the shell with stdout/stderr
// captured into the per-run work directory.

#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "oscidet_cli_work";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct RunResult {
    int exit_code{-1};
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path log = work_dir() / ("run_" + std::to_string(counter++) + ".log");
    const std::string command = std::string(OSCIDET_CLI_PATH) + " " + args +
                                " > " + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    result.output = buffer.str();
    return result;
}

std::string scenario_path(const std::string& name) {
    return (fs::path(OSCIDET_SCENARIO_DIR) / name).string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::size_t line_count(const fs::path& path) {
    std::ifstream in(path);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lines;
    }
    return lines;
}

fs::path write_text(const std::string& name, const std::string& text) {
    const fs::path path = work_dir() / name;
    std::ofstream out(path);
    out << text;
    return path;
}

// Valid scenario except for the ultrarelativistic requirement.
const char* kSlowPacket = R"({
  "schema_version": 1,
  "scenario": {
    "masses": [0.1, 0.2],
    "momenta": [10.0, 10.0],
    "widths": [0.0, 0.0],
    "mixing": {"angle": 0.5},
    "sigma": 5.0,
    "initial_flavor": 0
  },
  "detection": {"threshold": 0.0, "product_masses": [1.0], "localization": 1.0},
  "run": {"l_grid": {"start": 100.0, "stop": 300.0, "count": 41}, "flavor": 1}
})";

// Identity mixing blocks the flavor change: the curve is identically zero,
// so the mandatory amplitude-sum fit cannot succeed.
const char* kBlocked = R"({
  "schema_version": 1,
  "scenario": {
    "masses": [0.1, 0.2],
    "momenta": [10.0, 10.0],
    "widths": [0.0, 0.0],
    "mixing": {"angle": 0.0},
    "sigma": 20.0,
    "initial_flavor": 0
  },
  "detection": {"threshold": 0.0, "product_masses": [1.0], "localization": 1.0},
  "run": {"l_grid": {"start": 160.0, "stop": 220.0, "count": 31}, "flavor": 1}
})";

// Small scan over two thresholds.  Heavy products keep the kernel
// correlation time far above the packet passage time (the regime where the
// fitted wavenumber tracks the threshold-shifted prediction), and the
// thresholds sit near the state energies so both states keep comparable
// detection weight.
const char* kScan = R"({
  "schema_version": 1,
  "scenario": {
    "masses": [0.5, 1.0],
    "momenta": [5.0, 5.0],
    "widths": [0.0, 0.0],
    "mixing": {"angle": 0.78539816339744831},
    "sigma": 20.0,
    "initial_flavor": 0
  },
  "detection": {"threshold": 0.0, "product_masses": [5000.0], "localization": 1.0},
  "run": {
    "l_grid": {"start": 160.0, "stop": 347.0, "count": 181},
    "flavor": 1,
    "thresholds": [4.95, 5.0]
  }
})";

}  // namespace

TEST_CASE("validate accepts the shipped scenarios") {
    for (const char* name : {"oracle_window.json", "ur2f_coherent.json",
                             "ur2f_baselines.json", "ur2f_literal.json"}) {
        CAPTURE(name);
        const RunResult run =
            run_cli("--scenario " + scenario_path(name) + " validate");
        CHECK(run.exit_code == 0);
        CHECK(run.output.find("scenario OK") != std::string::npos);
    }
}

TEST_CASE("validate rejects a broken scenario with exit code 1") {
    const fs::path bad = write_text("slow_packet.json", kSlowPacket);
    const RunResult run =
        run_cli("--scenario " + bad.string() + " validate");
    CHECK(run.exit_code == 1);
    CHECK(run.output.find("validation error") != std::string::npos);
    CHECK(run.output.find("sigma * min(momentum)") != std::string::npos);
}

TEST_CASE("usage errors do not masquerade as computation failures") {
    const RunResult missing = run_cli("validate");
    CHECK(missing.exit_code != 0);
    CHECK(missing.exit_code != 1);
    CHECK(missing.exit_code != 2);
    CHECK(missing.exit_code != 3);

    const RunResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("density") != std::string::npos);
    CHECK(help.output.find("scan") != std::string::npos);
}

TEST_CASE("density produces the full deterministic artifact set") {
    const fs::path out1 = work_dir() / "density_a";
    const fs::path out2 = work_dir() / "density_b";
    const std::string base =
        "--scenario " + scenario_path("oracle_window.json") + " ";

    const RunResult first =
        run_cli(base + "--out " + out1.string() + " density");
    REQUIRE(first.exit_code == 0);

    // Wide CSV: header plus one row per grid point (count = 5).
    CHECK(line_count(out1 / "density.csv") == 6);
    CHECK(line_count(out1 / "plot_data.csv") == 6);
    CHECK(slurp(out1 / "density.csv").rfind("L,amplitude_sum", 0) == 0);

    const nlohmann::json summary =
        nlohmann::json::parse(slurp(out1 / "summary.json"));
    CHECK(summary.at("schema_version") == 1);
    CHECK(summary.at("run").at("window").at("mode") == "fixed");
    CHECK(summary.at("methods").contains("amplitude_sum"));
    const auto& meta = summary.at("methods").at("amplitude_sum").at("metadata");
    CHECK(meta.at("t_window") == 80.0);
    CHECK(meta.at("zero_curve") == false);
    CHECK(summary.at("analytic").at("standard_wavenumber").is_number());

    // Bitwise reproducible across runs.
    const RunResult second =
        run_cli(base + "--out " + out2.string() + " density");
    REQUIRE(second.exit_code == 0);
    CHECK(slurp(out1 / "density.csv") == slurp(out2 / "density.csv"));
    CHECK(slurp(out1 / "plot_data.csv") == slurp(out2 / "plot_data.csv"));
    CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
}

TEST_CASE("fit exits with code 3 when the curve cannot carry a frequency") {
    const fs::path blocked = write_text("blocked.json", kBlocked);
    const fs::path out = work_dir() / "fit_blocked";
    const RunResult run = run_cli("--scenario " + blocked.string() +
                                  " --out " + out.string() + " fit");
    CHECK(run.exit_code == 3);
    CHECK(run.output.find("fit error") != std::string::npos);
}

TEST_CASE("scan writes per-threshold rows and a slope") {
    const fs::path scan_file = write_text("small_scan.json", kScan);
    const fs::path out = work_dir() / "scan_out";
    const RunResult run = run_cli("--scenario " + scan_file.string() +
                                  " --out " + out.string() + " scan");
    REQUIRE(run.exit_code == 0);

    CHECK(line_count(out / "scan.csv") == 3);  // header + 2 thresholds
    CHECK(slurp(out / "scan.csv").rfind(
              "threshold,k_fit,k_uncertainty,k_analytic,failed", 0) == 0);

    const nlohmann::json summary =
        nlohmann::json::parse(slurp(out / "summary.json"));
    const auto& scan = summary.at("scan");
    CHECK(scan.at("points").size() == 2);
    CHECK(scan.at("partial") == false);
    CHECK(scan.at("slope").is_number());
    CHECK(scan.at("analytic_slope").is_number());
    // The fitted slope follows the analytic threshold dependence.
    const double ratio = scan.at("slope").get<double>() /
                         scan.at("analytic_slope").get<double>();
    CHECK(ratio > 0.8);
    CHECK(ratio < 1.2);
}

TEST_CASE("scan without thresholds is a validation error") {
    const RunResult run =
        run_cli("--scenario " + scenario_path("oracle_window.json") + " --out " +
                (work_dir() / "scan_missing").string() + " scan");
    CHECK(run.exit_code == 1);
    CHECK(run.output.find("validation error") != std::string::npos);
}
