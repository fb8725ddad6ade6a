// End-to-end checks of the fluxq binary: exit codes, JSON output, and
// byte-level determinism of emitted artifacts.
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(FLUXQ_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("fluxq_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("freq: value, parity, and json schema") {
    auto r = run_cli("freq --device sample_A --phi-t 0 --phi-b 0.5 --json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["converged"].get<bool>());
    const double f01 = j["f01_ghz"].get<double>();
    CHECK(f01 > 12.5);
    CHECK(f01 < 12.81);  // harmonic estimate minus anharmonic correction

    auto plus = run_cli("freq --device sample_A --phi-t 0 --phi-b 0.25 --json");
    auto minus = run_cli("freq --device sample_A --phi-t 0 --phi-b -0.25 --json");
    CHECK(plus.out == minus.out);  // alpha parity
}

TEST_CASE("exit codes: usage errors return 2, unknown preset returns 2") {
    CHECK(run_cli("freq --no-such-flag 1").exit_code == 2);
    CHECK(run_cli("definitely-not-a-subcommand").exit_code == 2);
    CHECK(run_cli("freq --device sample_Z --phi-t 0 --phi-b 0").exit_code == 2);
    CHECK(run_cli("sweep --phi-t 0:1 --phi-b 0:1:5 --out /tmp/fluxq_bad").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("sweep: size contract and byte-identical rerun") {
    const auto dir1 = temp_dir("sweep1");
    const auto dir2 = temp_dir("sweep2");
    const std::string axes = "--phi-t -0.2:0.2:5 --phi-b 0.4:0.8:5";
    REQUIRE(run_cli("sweep --device sample_A " + axes + " --out " + dir1.string()).exit_code == 0);
    REQUIRE(run_cli("sweep --device sample_A " + axes + " --out " + dir2.string()).exit_code == 0);
    const auto csv1 = slurp(dir1 / "sweep.csv");
    CHECK(csv1 == slurp(dir2 / "sweep.csv"));
    // header comments + column header + 25 data rows
    std::size_t data_rows = 0;
    std::istringstream ss(csv1);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && (std::isdigit(line[0]) || line[0] == '-')) ++data_rows;
    CHECK(data_rows == 25);

    // resumability: rerun into dir1 reuses checkpoints and reproduces the file
    fs::remove(dir1 / "sweep.csv");
    REQUIRE(run_cli("sweep --device sample_A " + axes + " --out " + dir1.string()).exit_code == 0);
    CHECK(slurp(dir1 / "sweep.csv") == csv1);
}

TEST_CASE("potential writes a table with three states") {
    const auto dir = temp_dir("pot");
    REQUIRE(run_cli("potential --device sample_A --phi-b 1.0 --grid 64 --out " + dir.string())
                .exit_code == 0);
    const auto csv = slurp(dir / "potential.csv");
    CHECK(csv.find("phi,u_ghz,e0_ghz,psi0_abs2,e1_ghz,psi1_abs2,e2_ghz,psi2_abs2") !=
          std::string::npos);
}

TEST_CASE("t1 emits the three-limit schema over a monotone axis") {
    const auto dir = temp_dir("t1");
    REQUIRE(run_cli("t1 --device sample_A --f01 3:7:5 --json --out " + dir.string())
                .exit_code == 0);
    const auto csv = slurp(dir / "t1.csv");
    CHECK(csv.find("f01_ghz,t1_purcell_s,t1_charge_s,t1_total_s,q_total") == 0);
    const auto rows = nlohmann::json::parse(slurp(dir / "t1.json"));
    REQUIRE(rows.size() == 5);
    double prev = 0.0;
    for (const auto& row : rows) {
        CHECK(row["f01_ghz"].get<double>() > prev);
        prev = row["f01_ghz"].get<double>();
    }
}

TEST_CASE("tls: identical seeds give identical SVG bytes") {
    const auto dir1 = temp_dir("tls1");
    const auto dir2 = temp_dir("tls2");
    const std::string args =
        "tls --device sample_B --strain -1:1:21 --freq 3:6:21 --density 2 --seed 42 --svg --out ";
    REQUIRE(run_cli(args + dir1.string()).exit_code == 0);
    REQUIRE(run_cli(args + dir2.string()).exit_code == 0);
    CHECK(slurp(dir1 / "tls_spectrum.svg") == slurp(dir2 / "tls_spectrum.svg"));
    CHECK(slurp(dir1 / "tls_ensemble.json") == slurp(dir2 / "tls_ensemble.json"));
}

TEST_CASE("config file feeds defaults; flags win") {
    const auto dir = temp_dir("cfg");
    {
        std::ofstream cfg(dir / "run.json");
        cfg << R"({"device": {"preset": "sample_B"}, "solve": {"f01_rel_tol": 1e-6}})";
    }
    auto with_cfg = run_cli("freq --config " + (dir / "run.json").string() +
                            " --phi-t 0 --phi-b 0.5 --json");
    REQUIRE(with_cfg.exit_code == 0);
    const auto j = nlohmann::json::parse(with_cfg.out);
    // sample B harmonic scale: sqrt(2*61*0.57) ~ 8.3 GHz
    CHECK(j["f01_ghz"].get<double>() < 9.0);
    CHECK(j["config"]["device"]["preset"] == "sample_B");

    auto flag_wins = run_cli("freq --config " + (dir / "run.json").string() +
                             " --device sample_A --phi-t 0 --phi-b 0.5 --json");
    REQUIRE(flag_wins.exit_code == 0);
    CHECK(nlohmann::json::parse(flag_wins.out)["f01_ghz"].get<double>() > 12.0);
}
