#pragma once

// Command-line front end: INI configuration, run drivers and the self-test battery.

#include "mtf/fermi.hpp"
#include "mtf/mtf.hpp"
#include "mtf/params.hpp"
#include "mtf/scaling.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtf::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNotConverged = 2, kPartialScan = 3, kSelftestFailed = 4 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EosBlock {
    std::vector<double> mu, T, B;
};

struct ScaledBlock {
    double mu = 0.0;
    double T = 1.0;
    Beta beta = Beta::finite(0.0);
    double z = 1.0;
    Confinement W;
};

struct GridBlock {
    std::size_t n = 2000;
    std::optional<double> r_min;
    std::optional<double> r_max;
};

struct ScanBlock {
    std::vector<double> betas;
    scaling::LimitMode mode = scaling::LimitMode::beta_to_infinity;
};

struct OutputBlock {
    std::string dir = ".";
    bool emit_unscaled = false;
};

struct SelftestBlock {
    /// Every tolerance of the battery is multiplied by this.
    double tolerance_scale = 1.0;
    /// Test fixture: perturbs the leading Sommerfeld coefficient.
    bool inject_sommerfeld_error = false;
};

struct RunConfig {
    std::string command;
    std::optional<PhysicalParams> physical;
    std::optional<ScaledBlock> scaled;
    EosBlock eos;
    GridBlock grid;
    SolveOptions solver;
    ScanBlock scan;
    OutputBlock output;
    SelftestBlock selftest;
};

/// Parses INI text ([eos] [physical] [scaled] [grid] [solver] [scan] [output]
/// [selftest]) and validates it for the given command.  Throws ConfigError.
RunConfig parse_config(std::istream& in, const std::string& command);
RunConfig load_config(const std::string& path, const std::string& command);

/// The scaled problem described by cfg (physical blocks are mapped through scale_params).
ScaledProblem make_problem(const RunConfig& cfg);

int run_eos_table(const RunConfig& cfg, std::ostream& diag);
int run_solve(const RunConfig& cfg, std::ostream& diag);
int run_scan(const RunConfig& cfg, std::ostream& diag);
int run_selftest(const RunConfig& cfg, std::ostream& out);

struct CheckResult {
    std::string module;
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> selftest_battery(const SelftestBlock& opts);

/// `mtf <command> --config <path> [--out <dir>] [--emit-unscaled]`
int main_entry(int argc, char** argv);

}  // namespace mtf::cli
