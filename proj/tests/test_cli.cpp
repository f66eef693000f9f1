#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtf/cli.hpp"
#include "mtf/eos.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace mtf;
using namespace mtf::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text, const std::string& command) {
    std::istringstream in(text);
    return parse_config(in, command);
}

std::string config_error(const std::string& text, const std::string& command) {
    try {
        parse(text, command);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path fresh_dir(const std::string& name) {
    const auto p = fs::current_path() / "cli_test_out" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::vector<double> split(const std::string& row) {
    std::vector<double> v;
    std::istringstream is(row);
    for (std::string cell; std::getline(is, cell, ',');) v.push_back(std::stod(cell));
    return v;
}

const char* kTrivialSolve = "[scaled]\nmu = -50\nT = 0.05\nbeta = 1\nz = 0\n[grid]\nn = 200\n";
const char* kScanBase = "[scaled]\nmu = 0\nT = 0.5\n[grid]\nn = 300\n";

int call_main(std::vector<std::string> args) {
    args.insert(args.begin(), "mtf");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return main_entry(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("validation messages are specific") {
    CHECK(config_error("[physical]\nT = 0\n", "solve").find("T") != std::string::npos);
    CHECK(config_error("[physical]\nT = -1\n", "solve") != config_error("[physical]\nZ = 0\n", "solve"));
    CHECK(config_error("[physical]\nZ = 0\n", "solve").find("Z") != std::string::npos);
    CHECK(config_error("[scaled]\nz = 1.5\n", "solve").find("z") != std::string::npos);
    CHECK(config_error("[scaled]\n[grid]\nn = 8\n", "solve").find("n") != std::string::npos);
    CHECK(config_error("[scaled]\nmu = 0\n[scan]\nbetas = 1, 10, 5\n", "scan").find("monotone") != std::string::npos);
    CHECK(config_error("[scaled]\ncolour = red\n", "solve").find("colour") != std::string::npos);
    CHECK(config_error("[nonsense]\nx = 1\n", "solve").find("nonsense") != std::string::npos);
    CHECK(config_error("[grid]\nn = 100\n", "solve").find("exactly one") != std::string::npos);
    CHECK(config_error("[scaled]\nmu = 0\n[physical]\nZ = 2\n", "solve").find("exactly one") != std::string::npos);
    CHECK(config_error("[scaled]\nmu = 0\n", "scan").find("betas") != std::string::npos);
    CHECK(config_error("", "plot").find("plot") != std::string::npos);

    std::vector<std::string> msgs;
    for (const char* text : {"[physical]\nT = 0\n", "[physical]\nZ = 0\n", "[scaled]\nz = 1.5\n",
                             "[scaled]\n[grid]\nn = 8\n"}) {
        msgs.push_back(config_error(text, "solve"));
    }
    for (std::size_t i = 0; i < msgs.size(); ++i) {
        CHECK_FALSE(msgs[i].empty());
        for (std::size_t j = 0; j < i; ++j) CHECK(msgs[i] != msgs[j]);
    }
}

TEST_CASE("parsing accepts lists, infinity and physical parameters") {
    const auto cfg = parse("[eos]\nmu = 1, 0, -1\nT = 1\nB = 0, 2\n[scaled]\nbeta = inf\n", "eos-table");
    CHECK(cfg.eos.mu.size() == 3);
    CHECK(cfg.eos.B.size() == 2);
    REQUIRE(cfg.scaled);
    CHECK(cfg.scaled->beta.is_infinite());

    const auto phys = parse("[physical]\nZ = 8\nB = 16\nT = 1\n[grid]\nn = 100\n", "solve");
    const auto prob = make_problem(phys);
    CHECK(prob.beta.value() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(prob.grid->size() == 100);
}

TEST_CASE("eos-table") {
    std::ostringstream diag;

    auto one = parse("[eos]\nmu = 0\nT = 1\nB = 1\n", "eos-table");
    one.output.dir = fresh_dir("eos_one").string();
    CHECK(run_eos_table(one, diag) == kOk);
    auto rows = lines(fs::path(one.output.dir) / "eos_table.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "mu,T,B,pressure,density,lower_bound,upper_bound");
    const auto v = split(rows[1]);
    REQUIRE(v.size() == 7);
    CHECK(v[3] == doctest::Approx(eos::landau_pressure({0.0, 1.0, 1.0})).epsilon(1e-15));
    CHECK(v[4] == doctest::Approx(eos::landau_density({0.0, 1.0, 1.0})).epsilon(1e-15));
    CHECK(v[5] <= v[3]);
    CHECK(v[3] <= v[6]);

    auto empty = parse("[eos]\nT = 1\nB = 1\n", "eos-table");
    empty.output.dir = fresh_dir("eos_empty").string();
    CHECK(run_eos_table(empty, diag) == kOk);
    CHECK(lines(fs::path(empty.output.dir) / "eos_table.csv").size() == 1);
    CHECK(diag.str().find("warning") != std::string::npos);

    auto grid = parse("[eos]\nmu = 5, -1, 0\nT = 2, 0.5, 1\nB = 10, 0, 1\n", "eos-table");
    grid.output.dir = fresh_dir("eos_grid").string();
    CHECK(run_eos_table(grid, diag) == kOk);
    rows = lines(fs::path(grid.output.dir) / "eos_table.csv");
    REQUIRE(rows.size() == 28);
    std::vector<std::vector<double>> keys;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto r = split(rows[i]);
        keys.push_back({r[0], r[1], r[2]});
        CHECK(r[5] <= r[3]);
        CHECK(r[3] <= r[6]);
    }
    CHECK(std::is_sorted(keys.begin(), keys.end()));
}

TEST_CASE("solve writes a report") {
    std::ostringstream diag;
    auto cfg = parse(kTrivialSolve, "solve");
    cfg.output.dir = fresh_dir("solve_a").string();
    REQUIRE(run_solve(cfg, diag) == kOk);
    const auto a = read_json(fs::path(cfg.output.dir) / "report.json");
    CHECK(a["spec_version"] == 1);
    CHECK(a["converged"] == true);
    CHECK(a["particle_number"].get<double>() >= 0.0);
    CHECK(a["particle_number"].get<double>() < 1e-10);
    CHECK(fs::exists(fs::path(cfg.output.dir) / "density.csv"));
    for (const char* key : {"parameters", "solver", "iterations", "pressure", "functional_terms", "duality",
                            "residual_history", "timestamp"}) {
        CHECK(a.contains(key));
    }

    cfg.output.dir = fresh_dir("solve_b").string();
    REQUIRE(run_solve(cfg, diag) == kOk);
    auto b = read_json(fs::path(cfg.output.dir) / "report.json");
    auto a2 = a;
    a2.erase("timestamp");
    b.erase("timestamp");
    CHECK(a2 == b);
}

TEST_CASE("solve reports non-convergence") {
    std::ostringstream diag;
    auto cfg = parse("[scaled]\nmu = 0\nT = 0.5\n[grid]\nn = 200\n[solver]\nmax_iter = 1\n", "solve");
    cfg.output.dir = fresh_dir("solve_starved").string();
    CHECK(run_solve(cfg, diag) == kNotConverged);
    const auto j = read_json(fs::path(cfg.output.dir) / "report.json");
    CHECK(j["converged"] == false);
    CHECK(diag.str().find("converge") != std::string::npos);
}

TEST_CASE("solve emits unscaled output for physical input") {
    std::ostringstream diag;
    auto cfg = parse("[physical]\nZ = 8\nB = 16\nT = 0.3\nmu = -0.5\n[grid]\nn = 200\n[output]\nemit_unscaled = true\n",
                     "solve");
    cfg.output.dir = fresh_dir("solve_unscaled").string();
    REQUIRE(run_solve(cfg, diag) == kOk);
    const auto j = read_json(fs::path(cfg.output.dir) / "report.json");
    REQUIRE(j.contains("unscaled"));
    CHECK(j["unscaled"]["particle_number"].get<double>() ==
          doctest::Approx(8.0 * j["particle_number"].get<double>()));
    CHECK(fs::exists(fs::path(cfg.output.dir) / "density_unscaled.csv"));
}

TEST_CASE("scan") {
    std::ostringstream diag;
    auto cfg = parse(std::string(kScanBase) + "[scan]\nbetas = 100, 10000, 1000000\n", "scan");
    cfg.output.dir = fresh_dir("scan_up").string();
    REQUIRE(run_scan(cfg, diag) == kOk);
    CHECK(lines(fs::path(cfg.output.dir) / "scan.csv").size() == 5);
    const auto j = read_json(fs::path(cfg.output.dir) / "scan_summary.json");
    CHECK(j["rows"].size() == 3);
    CHECK(j["gaps_decreasing"] == true);
    CHECK(j["decay_exponent"].is_number());
    CHECK(j["mode"] == "beta_to_inf");

    auto single = parse(std::string(kScanBase) + "[scan]\nbetas = 10\n", "scan");
    single.output.dir = fresh_dir("scan_single").string();
    REQUIRE(run_scan(single, diag) == kOk);
    const auto s = read_json(fs::path(single.output.dir) / "scan_summary.json");
    CHECK(s["decay_exponent"].is_null());
    CHECK(s["note"].get<std::string>().find("insufficient") != std::string::npos);

    auto starved = parse(std::string(kScanBase) + "[scan]\nbetas = 1, 10\n[solver]\nmax_iter = 1\n", "scan");
    starved.output.dir = fresh_dir("scan_starved").string();
    CHECK(run_scan(starved, diag) == kPartialScan);
    const auto f = read_json(fs::path(starved.output.dir) / "scan_summary.json");
    for (const auto& row : f["rows"]) CHECK(row["ok"] == false);
    CHECK(diag.str().find("failed") != std::string::npos);
}

TEST_CASE("selftest") {
    std::ostringstream out;
    CHECK(run_selftest(parse("", "selftest"), out) == kOk);
    CHECK(out.str().find("FAIL") == std::string::npos);

    std::ostringstream bad;
    CHECK(run_selftest(parse("[selftest]\ninject_sommerfeld_error = true\n", "selftest"), bad) == kSelftestFailed);
    const auto results = selftest_battery(SelftestBlock{1.0, true});
    int failed = 0;
    for (const auto& r : results) {
        if (!r.passed) {
            ++failed;
            CHECK(r.module == "fermi");
        }
    }
    CHECK(failed >= 1);

    std::ostringstream strict;
    CHECK(run_selftest(parse("[selftest]\ntolerance_scale = 0\n", "selftest"), strict) != kOk);
}

TEST_CASE("command line exit codes") {
    CHECK(call_main({"solve"}) == kConfigError);
    CHECK(call_main({"plot", "--config", "x.ini"}) == kConfigError);
    CHECK(call_main({"solve", "--config", "definitely_missing.ini"}) == kConfigError);

    const auto dir = fresh_dir("main");
    {
        std::ofstream cfg(dir / "eos.ini");
        cfg << "[eos]\nmu = 0\nT = 1\nB = 0\n";
    }
    CHECK(call_main({"eos-table", "--config", (dir / "eos.ini").string(), "--out", dir.string()}) == kOk);
    CHECK(lines(dir / "eos_table.csv").size() == 2);
    {
        std::ofstream cfg(dir / "bad.ini");
        cfg << "[eos]\nmu = 0\nT = -1\nB = 0\n";
    }
    CHECK(call_main({"eos-table", "--config", (dir / "bad.ini").string()}) == kConfigError);
}
