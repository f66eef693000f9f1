#include "mtf/scaling.hpp"

#include "mtf/errors.hpp"

#include <cmath>
#include <ostream>

namespace mtf::scaling {

ScaledParams scale_params(const PhysicalParams& p) {
    if (!(p.Z > 0.0) || !std::isfinite(p.Z)) throw DomainError("Z must be > 0");
    if (!(p.B >= 0.0) || !std::isfinite(p.B)) throw DomainError("B must be finite and >= 0");
    if (!(p.T > 0.0)) throw DomainError("T must be > 0");
    for (const auto& nuc : p.nuclei) {
        if (nuc.charge > 1.0) throw DomainError("nuclear charge fractions must be <= 1");
    }
    // Extended precision keeps each result within half an ulp of the exact value,
    // so the algebraic identities between them hold to a few ulp.
    using ld = long double;
    const ld Z = p.Z;
    const ld z3 = std::cbrt(Z);
    const ld beta = static_cast<ld>(p.B) / (Z * z3);
    const ld p5 = std::pow(1.0L + beta, 0.2L);  // (1+beta)^{1/5}
    const ld ell = 1.0L / (z3 * p5 * p5);
    const ld energy = Z / ell;

    ScaledParams s;
    s.beta = static_cast<double>(beta);
    s.ell = static_cast<double>(ell);
    s.energy = static_cast<double>(energy);
    s.mu_tilde = static_cast<double>(p.mu / energy);
    s.T_tilde = static_cast<double>(p.T / energy);
    s.B_tilde = static_cast<double>(beta / (p5 * p5));
    s.h = static_cast<double>(p5 / z3);
    s.b = static_cast<double>(z3 * beta / (p5 * p5 * p5));
    return s;
}

ScaledProblem scaled_problem(const PhysicalParams& p, fields::GridPtr grid) {
    if (p.nuclei.size() != 1) throw UnsupportedGeometry("the radial path handles exactly one nucleus");
    const auto s = scale_params(p);
    ScaledProblem prob;
    prob.mu_tilde = s.mu_tilde;
    prob.T_tilde = s.T_tilde;
    prob.beta = Beta::finite(s.beta);
    prob.z = p.nuclei.front().charge;
    prob.W = p.W;
    prob.grid = std::move(grid);
    return prob;
}

fields::DensityField scale_density(const fields::DensityField& rho_tilde, const PhysicalParams& p) {
    const auto s = scale_params(p);
    const double factor = p.Z / (s.ell * s.ell * s.ell);
    auto grid = fields::make_grid(rho_tilde.grid->scaled(s.ell));
    std::vector<double> v(rho_tilde.values);
    for (auto& x : v) x *= factor;
    return fields::DensityField(std::move(grid), std::move(v));
}

fields::DensityField unscale_density(const fields::DensityField& rho, const PhysicalParams& p) {
    const auto s = scale_params(p);
    const double factor = s.ell * s.ell * s.ell / p.Z;
    auto grid = fields::make_grid(rho.grid->scaled(1.0 / s.ell));
    std::vector<double> v(rho.values);
    for (auto& x : v) x *= factor;
    return fields::DensityField(std::move(grid), std::move(v));
}

RescaleReport pressure_rescale_check(const fields::DensityField& rho_tilde, const PhysicalParams& p) {
    const auto s = scale_params(p);
    RescaleReport r;
    r.scaled = eval_pressure_functional(rho_tilde, scaled_problem(p, rho_tilde.grid));
    r.factor = p.Z * p.Z / s.ell;
    if (!std::isfinite(r.factor * r.scaled)) {
        throw RangeError("Z^2/l times the scaled functional overflows; use scaled variables only");
    }
    r.unscaled = eval_unscaled_pressure_functional(scale_density(rho_tilde, p), p);
    const double expected = r.factor * r.scaled;
    r.discrepancy = (r.unscaled == expected) ? 0.0 : std::abs(r.unscaled - expected) / std::abs(r.unscaled);
    return r;
}

bool ScanResult::all_ok() const {
    if (!limit.ok) return false;
    for (const auto& row : rows) {
        if (!row.ok) return false;
    }
    return true;
}

namespace {

ScanRow solve_row(ScaledProblem prob, Beta beta, double beta_value, const SolveOptions& opts) {
    ScanRow row;
    row.beta = beta_value;
    prob.beta = beta;
    try {
        const auto rep = scf_solve(prob, opts);
        row.pressure = rep.pressure;
        row.ok = rep.converged;
        if (!rep.converged) row.error = "not converged after " + std::to_string(rep.iterations) + " iterations";
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

ScanResult limit_scan(const ScaledProblem& base, const std::vector<double>& betas, LimitMode mode,
                      const SolveOptions& opts) {
    for (std::size_t i = 1; i < betas.size(); ++i) {
        const bool up = betas[i] > betas[i - 1];
        const bool down = betas[i] < betas[i - 1];
        if (!(up || down) || (i > 1 && up != (betas[1] > betas[0]))) {
            throw DomainError("beta sequence must be strictly monotone");
        }
    }
    ScanResult scan;
    if (mode == LimitMode::beta_to_infinity) {
        scan.limit = solve_row(base, Beta::infinite(), std::numeric_limits<double>::infinity(), opts);
    } else {
        scan.limit = solve_row(base, Beta::finite(0.0), 0.0, opts);
    }
    for (double b : betas) {
        auto row = solve_row(base, Beta::finite(b), b, opts);
        row.limit_pressure = scan.limit.pressure;
        if (row.ok && scan.limit.ok) {
            row.rel_gap = std::abs(row.pressure - scan.limit.pressure) / std::abs(scan.limit.pressure);
        } else {
            row.ok = false;
            if (row.error.empty()) row.error = "limit branch failed";
        }
        scan.rows.push_back(row);
    }

    std::vector<double> xs, ys;
    for (const auto& row : scan.rows) {
        if (row.ok && row.rel_gap > 0.0 && row.beta > 0.0) {
            xs.push_back(std::log(row.beta));
            ys.push_back(std::log(row.rel_gap));
        }
    }
    if (xs.size() >= 3) {
        const double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        scan.decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return scan;
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
    const auto old = out.precision(17);
    out << "beta,pressure,limit_pressure,rel_gap,status\n";
    for (const auto& row : scan.rows) {
        out << row.beta << ',' << row.pressure << ',' << row.limit_pressure << ',' << row.rel_gap << ','
            << (row.ok ? "ok" : "failed") << '\n';
    }
    out << (std::isinf(scan.limit.beta) ? "inf" : "0") << ',' << scan.limit.pressure << ','
        << scan.limit.pressure << ",0," << (scan.limit.ok ? "limit" : "failed") << '\n';
    out.precision(old);
}

}  // namespace mtf::scaling
