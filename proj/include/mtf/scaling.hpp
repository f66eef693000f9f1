#pragma once

// Map between physical (Z, B, T, mu) and scaled variables, and beta-limit scans.

#include "mtf/fields.hpp"
#include "mtf/mtf.hpp"
#include "mtf/params.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mtf::scaling {

struct ScaledParams {
    double beta = 0.0;      ///< B / Z^{4/3}
    double ell = 1.0;       ///< Z^{-1/3} (1 + beta)^{-2/5}
    double energy = 1.0;    ///< Z / ell
    double mu_tilde = 0.0;  ///< mu / energy
    double T_tilde = 1.0;   ///< T / energy
    double B_tilde = 0.0;   ///< beta (1 + beta)^{-2/5}
    double h = 1.0;         ///< Z^{-1/3} (1 + beta)^{1/5}
    double b = 0.0;         ///< Z^{1/3} beta (1 + beta)^{-3/5}
};

ScaledParams scale_params(const PhysicalParams& p);

/// The scaled problem of p on a given scaled grid.
ScaledProblem scaled_problem(const PhysicalParams& p, fields::GridPtr grid);

/// rho(x) = Z l^{-3} rho~(x / l) on the grid stretched by l.
fields::DensityField scale_density(const fields::DensityField& rho_tilde, const PhysicalParams& p);
/// Inverse of scale_density.
fields::DensityField unscale_density(const fields::DensityField& rho, const PhysicalParams& p);

struct RescaleReport {
    double unscaled = 0.0;  ///< physical functional on the mapped density
    double scaled = 0.0;    ///< scaled functional on rho~
    double factor = 0.0;    ///< Z^2 / l
    double discrepancy = 0.0;
};

/// Evaluates the functional on both sides of the scaling relation.
RescaleReport pressure_rescale_check(const fields::DensityField& rho_tilde, const PhysicalParams& p);

enum class LimitMode { beta_to_infinity, beta_to_zero };

struct ScanRow {
    double beta = 0.0;
    double pressure = 0.0;
    double limit_pressure = 0.0;
    double rel_gap = 0.0;
    bool ok = false;
    std::string error;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    ScanRow limit;
    /// Least-squares slope of log gap against log beta, with >= 3 successful rows.
    std::optional<double> decay_exponent;
    bool all_ok() const;
};

/// Solves at every beta of the (monotone) sequence and at the limit branch.
ScanResult limit_scan(const ScaledProblem& base, const std::vector<double>& betas, LimitMode mode,
                      const SolveOptions& opts = {});

/// CSV with header "beta,pressure,limit_pressure,rel_gap,status".
void write_scan_csv(std::ostream& out, const ScanResult& scan);

}  // namespace mtf::scaling
