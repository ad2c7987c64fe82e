// End-to-end checks of the CLI binary: every subcommand emits a report
// that validates against the shipped schema, identical invocations are
// byte-identical apart from the timestamp, and failures produce a
// machine-readable error JSON with a nonzero exit code.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alphalab/report.hpp"

#ifndef ALPHALAB_CLI_PATH
#error "ALPHALAB_CLI_PATH must point at the alphalab binary"
#endif
#ifndef ALPHALAB_SCHEMA_PATH
#error "ALPHALAB_SCHEMA_PATH must point at schemas/report.schema.json"
#endif

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string out_file = (dir / "alphalab_cli_stdout.txt").string();
    const std::string err_file = (dir / "alphalab_cli_stderr.txt").string();
    const std::string cmd = std::string(ALPHALAB_CLI_PATH) + " " + args + " > " + out_file +
                            " 2> " + err_file;
    RunResult result;
    const int status = std::system(cmd.c_str());
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.stdout_text = slurp(out_file);
    result.stderr_text = slurp(err_file);
    std::remove(out_file.c_str());
    std::remove(err_file.c_str());
    return result;
}

json load_schema() { return json::parse(slurp(ALPHALAB_SCHEMA_PATH)); }

std::string panel_csv_path() {
    static std::string path;
    if (path.empty()) {
        path = (std::filesystem::temp_directory_path() / "alphalab_test_panel.csv").string();
        std::ofstream out(path);
        out << "t,y,x1,z1\n";
        const double data[12][3] = {
            {0.012, 0.010, 0.002},  {-0.004, -0.006, 0.001}, {0.009, 0.007, 0.003},
            {0.015, 0.012, 0.004},  {-0.011, -0.009, -0.002}, {0.006, 0.004, 0.001},
            {0.013, 0.011, 0.005},  {-0.002, -0.003, 0.000}, {0.008, 0.006, 0.002},
            {0.010, 0.009, 0.001},  {-0.007, -0.008, -0.003}, {0.004, 0.003, 0.002}};
        for (int j = 0; j < 12; ++j)
            out << (j + 1) / 16.0 << ',' << data[j][0] << ',' << data[j][1] << ','
                << data[j][2] << '\n';
    }
    return path;
}

json expect_valid_report(const std::string& args, const std::string& command) {
    const auto run = run_cli(args);
    INFO("args: ", args, " stderr: ", run.stderr_text);
    REQUIRE(run.exit_code == 0);
    const json report = json::parse(run.stdout_text);
    CHECK(report["command"] == command);
    const auto problems = alphalab::validate_schema(load_schema(), report);
    for (const auto& p : problems) MESSAGE(p);
    CHECK(problems.empty());
    return report;
}

} // namespace

TEST_CASE("every subcommand emits a schema-valid report") {
    const std::string panel = panel_csv_path();
    expect_valid_report("fit --input " + panel + " --seed 7", "fit");
    expect_valid_report("timing --input " + panel +
                            " --eta auto --quantile 0.95 --calib-trials 5000 --seed 3",
                        "timing");
    expect_valid_report("timing --input " + panel + " --eta 0.5 --power-dof 12 --seed 3",
                        "timing");
    expect_valid_report("power --dof 6 --dim 2 --eta 0.75,1.25 --mc-trials 2000 --seed 5",
                        "power");
    expect_valid_report(
        "simulate --scheme bridge --x0 0 --target 0 --level 7 --trials 50 --seed 7", "simulate");
    expect_valid_report("simulate --scheme subordinated --level 7 --trials 50 --seed 7",
                        "simulate");
    expect_valid_report(
        "simulate --scheme strategy --x 0.2 --level 7 --trials 20 --seed 7", "simulate");
    expect_valid_report("excursion --level 6 --trials 50 --seed 11", "excursion");
    expect_valid_report("ledger --input " + panel + " --policy after-loss --seed 1", "ledger");
    expect_valid_report("ledger --input " + panel + " --policy oracle --seed 1", "ledger");
    expect_valid_report("study --x 0.1 --N 10 --rho 0.3 --trials 500 --seed 1", "study");
}

TEST_CASE("identical invocations differ only in the timestamp") {
    const std::string args = "study --x 0.1 --N 10 --rho 0.3 --trials 500 --seed 42";
    auto first = json::parse(run_cli(args).stdout_text);
    auto second = json::parse(run_cli(args).stdout_text);
    first.erase("timestamp");
    second.erase("timestamp");
    CHECK(first.dump() == second.dump());
}

TEST_CASE("different seeds change the stochastic results") {
    const std::string base = "simulate --scheme bm --level 7 --trials 20 --seed ";
    auto a = json::parse(run_cli(base + "1").stdout_text);
    auto b = json::parse(run_cli(base + "2").stdout_text);
    CHECK(a["result"]["ensemble"]["terminal_mean"] != b["result"]["ensemble"]["terminal_mean"]);
}

TEST_CASE("the auto seed is embedded for reproducibility") {
    const auto run = run_cli("simulate --scheme bm --level 6 --trials 5");
    REQUIRE(run.exit_code == 0);
    const json report = json::parse(run.stdout_text);
    const std::uint64_t seed = report["config"]["seed"].get<std::uint64_t>();
    const auto rerun = json::parse(
        run_cli("simulate --scheme bm --level 6 --trials 5 --seed " + std::to_string(seed))
            .stdout_text);
    CHECK(rerun["result"]["ensemble"]["terminal_mean"] ==
          report["result"]["ensemble"]["terminal_mean"]);
}

TEST_CASE("failures emit machine-readable error JSON and exit nonzero") {
    const auto missing = run_cli("fit --input /nonexistent/panel.csv");
    CHECK(missing.exit_code == 1);
    const json err = json::parse(missing.stderr_text);
    CHECK(err.contains("error"));
    CHECK(err["error"]["type"] == "runtime");

    // collinear hedge column -> structured rank error
    const auto dir = std::filesystem::temp_directory_path();
    const std::string bad_panel = (dir / "alphalab_collinear.csv").string();
    {
        std::ofstream out(bad_panel);
        out << "t,y,x1,z1\n";
        for (int j = 1; j <= 8; ++j)
            out << j / 16.0 << ",0.01," << 0.01 * j << ',' << 0.02 * j << '\n';
    }
    const auto rank = run_cli("fit --input " + bad_panel);
    std::remove(bad_panel.c_str());
    CHECK(rank.exit_code == 1);
    const json rank_err = json::parse(rank.stderr_text);
    CHECK(rank_err["error"]["type"] == "rank_deficient");
    CHECK(rank_err["error"].contains("columns"));
}

TEST_CASE("unknown flags fail") {
    const auto run = run_cli("fit --input whatever.csv --definitely-not-a-flag");
    CHECK(run.exit_code != 0);
}

TEST_CASE("path dumps land in the directory named by ALPHALAB_OUT_DIR") {
    const auto dir = std::filesystem::temp_directory_path() / "alphalab_outdir_test";
    std::filesystem::create_directories(dir);
    const std::string cmd = std::string("ALPHALAB_OUT_DIR=") + dir.string() + " " +
                            ALPHALAB_CLI_PATH +
                            " simulate --scheme bm --level 6 --trials 3 --seed 1 "
                            "--paths-out dump.csv --out report.json";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(std::filesystem::exists(dir / "dump.csv"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    std::filesystem::remove_all(dir);
}
