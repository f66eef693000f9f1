#pragma once

// Magnetic Thomas-Fermi theory in scaled variables on a radial grid.
//
// The pressure functional is
//
//     P[rho] = c \int P_{T,B~}(mu - V_rho) + D(rho, rho),    V_rho = -z/r + W(r) + rho * |x|^{-1}
//
// with c = (1 + beta)^{-3/5} and B~ = beta (1 + beta)^{-2/5}; at beta = infinity
// the integrand is the lowest-Landau-level pressure instead.  Its unique
// minimizer solves rho = c P'(mu - V_rho).

#include "mtf/fields.hpp"
#include "mtf/params.hpp"

#include <vector>

namespace mtf {

/// Local pressure w -> c P_{T,B}(w) (or P^inf_T(w)) with its derivative and
/// Legendre transform.
class LocalGas {
public:
    /// Gas of the scaled functional at (T~, beta).
    static LocalGas scaled(double T, Beta beta);
    /// Plain P_{T,B}.
    static LocalGas plain(double T, double B);
    /// P^inf_T.
    static LocalGas lowest_level(double T);

    double pressure(double w) const;
    double density(double w) const;
    /// f(rho) = sup_mu { mu rho - pressure(mu) }.
    double free_energy(double rho) const;
    /// f'(rho): the mu with density(mu) = rho.
    double chemical_potential(double rho) const;

    double temperature() const { return T_; }

private:
    LocalGas(double T, double B, double prefactor, bool lll);
    double T_;
    double B_;
    double c_;
    bool lll_;
};

struct ScaledProblem {
    double mu_tilde = 0.0;
    double T_tilde = 1.0;
    Beta beta = Beta::finite(0.0);
    double z = 1.0;
    Confinement W;
    fields::GridPtr grid;

    LocalGas gas() const { return LocalGas::scaled(T_tilde, beta); }
    void validate() const;
};

/// Default log grid for a problem: r_min = 1e-6 L, r_max = L with L where
/// mu + 1 - W(L) = -45 T, n nodes.
fields::GridPtr default_grid(double mu_tilde, double T_tilde, const Confinement& W, std::size_t n = 2000);

struct FunctionalTerms {
    double pressure_integral = 0.0;
    double hartree = 0.0;

    double total() const { return pressure_integral + hartree; }
};

FunctionalTerms pressure_functional_terms(const fields::DensityField& rho, const ScaledProblem& prob);
double eval_pressure_functional(const fields::DensityField& rho, const ScaledProblem& prob);

struct Residual {
    std::vector<double> values;  ///< rho - c P'(mu - V_rho)
    double sup_norm = 0.0;       ///< max |values| / (1 + rho)
};

Residual tf_residual(const fields::DensityField& rho, const ScaledProblem& prob);

struct SolveOptions {
    double damping = 0.5;
    double tol = 1e-8;
    int max_iter = 500;
    bool anderson = true;
    int anderson_depth = 6;
};

struct SolveReport {
    fields::DensityField density;
    double pressure = 0.0;
    std::vector<double> residual_history;
    std::vector<double> functional_history;
    int iterations = 0;
    bool converged = false;
    double hartree = 0.0;
    FunctionalTerms functional_terms;
    double particle_number = 0.0;
};

/// Descent-guarded damped fixed-point iteration (optionally Anderson-mixed)
/// started from the unscreened density.
SolveReport scf_solve(const ScaledProblem& prob, const SolveOptions& opts = {});

/// Legendre transform of the free-gas pressure P_{T,B}.
double free_energy_density(double rho, double T, double B);

/// \int (f(rho) + V rho) + D(rho, rho) with f the transform of the scaled local gas.
double eval_free_energy_functional(const fields::DensityField& rho, const ScaledProblem& prob);

/// The same functional at physical scale: \int P_{T,B}(mu - V_{Z,B} - v_rho) + D.
double eval_unscaled_pressure_functional(const fields::DensityField& rho, const PhysicalParams& params);

struct ExchangeCorrection {
    double C = 0.0;            ///< (3 / (5 gamma)) \int rho^{5/3}
    double mu_shift = 0.0;     ///< 3.68 gamma
    double lower_ratio = 0.0;  ///< (1 + beta)^{2/5} / gamma, small inside the window
    double upper_ratio = 0.0;  ///< gamma / (Z^{4/3} (1 + beta)^{2/5}), small inside the window
};

ExchangeCorrection exchange_correction(const fields::DensityField& rho, double gamma, double Z = 1.0,
                                       double beta = 0.0);

}  // namespace mtf
