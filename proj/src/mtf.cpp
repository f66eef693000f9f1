#include "mtf/mtf.hpp"

#include "mtf/eos.hpp"
#include "mtf/errors.hpp"
#include "mtf/scaling.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace mtf {

namespace {

using fields::DensityField;

// Beyond this (mu - V)/T at r_max the truncated grid misses pressure.
constexpr double kEdgeMargin = 30.0;
// Grid extent: mu - W(L) = -kGridReach T.
constexpr double kGridReach = 45.0;
// Relative slack for "nonincreasing" against rounding in the functional sum.
constexpr double kDescentSlack = 1e-13;

struct Evaluation {
    std::vector<double> arg;  // mu - V - v at each node
    std::vector<double> phi;  // c P'(arg)
    double pressure_integral = 0.0;
    double hartree = 0.0;

    double functional() const { return pressure_integral + hartree; }
};

std::vector<double> external_values(const ScaledProblem& prob) {
    return fields::scaled_external_potential(prob.z, prob.W, prob.grid).values;
}

Evaluation evaluate(const std::vector<double>& rho, const std::vector<double>& V, const ScaledProblem& prob,
                    const LocalGas& gas, bool want_phi) {
    const auto& g = *prob.grid;
    const auto v = fields::coulomb_potential(DensityField(prob.grid, rho));
    Evaluation e;
    e.arg.resize(g.size());
    if (want_phi) e.phi.resize(g.size());
    double hartree = 0.0;
    double pint = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double a = prob.mu_tilde - V[i] - v.values[i];
        e.arg[i] = a;
        pint += g.w(i) * gas.pressure(a);
        hartree += g.w(i) * rho[i] * v.values[i];
        if (want_phi) e.phi[i] = gas.density(a);
    }
    e.arg[0] = std::numeric_limits<double>::infinity();
    if (want_phi) e.phi[0] = e.phi[1];
    e.pressure_integral = pint;
    e.hartree = 0.5 * hartree;
    return e;
}

double weighted_sup(const std::vector<double>& rho, const std::vector<double>& phi) {
    double s = 0.0;
    for (std::size_t i = 1; i < rho.size(); ++i) s = std::max(s, std::abs(rho[i] - phi[i]) / (1.0 + rho[i]));
    return s;
}

}  // namespace

// ---------------------------------------------------------------- LocalGas

LocalGas::LocalGas(double T, double B, double prefactor, bool lll) : T_(T), B_(B), c_(prefactor), lll_(lll) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("temperature must be > 0");
    if (!(B >= 0.0) || !std::isfinite(B)) throw DomainError("field must be finite and >= 0");
}

LocalGas LocalGas::scaled(double T, Beta beta) {
    if (beta.is_infinite()) return LocalGas(T, 0.0, 1.0, true);
    return LocalGas(T, beta.scaled_field(), beta.pressure_prefactor(), false);
}

LocalGas LocalGas::plain(double T, double B) { return LocalGas(T, B, 1.0, false); }

LocalGas LocalGas::lowest_level(double T) { return LocalGas(T, 0.0, 1.0, true); }

double LocalGas::pressure(double w) const {
    if (lll_) return eos::lll_pressure(w, T_);
    return c_ * eos::landau_pressure({w, T_, B_});
}

double LocalGas::density(double w) const {
    if (lll_) return eos::lll_density(w, T_);
    return c_ * eos::landau_density({w, T_, B_});
}

double LocalGas::chemical_potential(double rho) const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("chemical potential needs 0 < rho < inf");
    // Nondegenerate side: density(mu) = A e^{mu/T} (1 + O(e^{mu/T})).
    const double deep = -40.0 * T_;
    const double n_deep = density(deep);
    if (rho <= n_deep) return deep + T_ * std::log(rho / n_deep);

    double lo = deep;
    double hi = T_;
    while (density(hi) < rho) {
        lo = hi;
        hi = 2.0 * hi + T_;
        if (!std::isfinite(hi) || hi > 1e300) {
            throw NumericError("no chemical potential bracket for rho = " + std::to_string(rho) +
                               " (searched up to mu = " + std::to_string(hi) + ")");
        }
    }
    auto f = [&](double mu) { return density(mu) - rho; };
    boost::uintmax_t iters = 200;
    const double floor = 1e-15 * T_;
    const auto tol = [floor](double a, double b) {
        return std::abs(a - b) <= std::max(1e-15 * std::max(std::abs(a), std::abs(b)), floor);
    };
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    if (iters >= 200) {
        throw NumericError("chemical potential root-find did not converge in [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]");
    }
    return 0.5 * (r.first + r.second);
}

double LocalGas::free_energy(double rho) const {
    if (!(rho >= 0.0)) throw DomainError("free energy needs rho >= 0");
    if (rho == 0.0) return 0.0;
    const double mu = chemical_potential(rho);
    return mu * rho - pressure(mu);
}

// ---------------------------------------------------------------- problem

void ScaledProblem::validate() const {
    if (!grid) throw SetupError("problem has no grid");
    if (!(T_tilde > 0.0)) throw DomainError("scaled temperature must be > 0");
    if (!std::isfinite(mu_tilde)) throw DomainError("scaled chemical potential must be finite");
    if (!(z >= 0.0) || z > 1.0) throw DomainError("nuclear charge fraction must lie in [0, 1]");
    const double R = grid->r_max();
    const double edge = (mu_tilde + z / R - W(R)) / T_tilde;
    if (edge > -kEdgeMargin) {
        throw SetupError("confinement too weak on the truncated grid: (mu - V(r_max))/T = " +
                         std::to_string(edge) + ", need < " + std::to_string(-kEdgeMargin));
    }
}

fields::GridPtr default_grid(double mu_tilde, double T_tilde, const Confinement& W, std::size_t n) {
    if (!(W.strength > 0.0) || !(W.power > 0.0)) throw SetupError("confinement must grow at infinity");
    // the extra 1 covers z / r for r >= 1
    const double target = std::max(mu_tilde, 0.0) + kGridReach * T_tilde + 1.0;
    const double L = std::max(1.0, std::pow(target / W.strength, 1.0 / W.power));
    return fields::make_grid(fields::RadialGrid::logarithmic(1e-6 * L, L, n));
}

FunctionalTerms pressure_functional_terms(const DensityField& rho, const ScaledProblem& prob) {
    prob.validate();
    rho.validate();
    const auto e = evaluate(rho.values, external_values(prob), prob, prob.gas(), false);
    return FunctionalTerms{e.pressure_integral, e.hartree};
}

double eval_pressure_functional(const DensityField& rho, const ScaledProblem& prob) {
    return pressure_functional_terms(rho, prob).total();
}

Residual tf_residual(const DensityField& rho, const ScaledProblem& prob) {
    prob.validate();
    rho.validate();
    const auto e = evaluate(rho.values, external_values(prob), prob, prob.gas(), true);
    Residual r;
    r.values.resize(rho.values.size());
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] = rho.values[i] - e.phi[i];
    r.sup_norm = weighted_sup(rho.values, e.phi);
    return r;
}

// ---------------------------------------------------------------- solver

SolveReport scf_solve(const ScaledProblem& prob, const SolveOptions& opts) {
    prob.validate();
    if (!(opts.damping > 0.0) || opts.damping > 1.0) throw DomainError("damping must lie in (0, 1]");
    if (!(opts.tol > 0.0)) throw DomainError("tolerance must be > 0");

    const auto gas = prob.gas();
    const auto V = external_values(prob);
    const std::size_t n = prob.grid->size();
    const double alpha = opts.damping;

    std::vector<double> x = evaluate(std::vector<double>(n, 0.0), V, prob, gas, true).phi;
    Evaluation ex = evaluate(x, V, prob, gas, true);

    auto residual_of = [](const std::vector<double>& xs, const Evaluation& e) {
        std::vector<double> f(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) f[i] = e.phi[i] - xs[i];
        return f;
    };
    auto check = [](const std::vector<double>& xs) {
        for (double v : xs) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw NumericError("solver produced an invalid density");
        }
    };

    std::deque<std::vector<double>> dX, dF;
    std::vector<double> f = residual_of(x, ex);

    SolveReport rep;
    for (int it = 0;; ++it) {
        const double res = weighted_sup(x, ex.phi);
        rep.residual_history.push_back(res);
        rep.functional_history.push_back(ex.functional());
        rep.iterations = it;
        if (res <= opts.tol) {
            rep.converged = true;
            break;
        }
        if (it >= opts.max_iter) break;

        std::vector<double> cand(n);
        bool mixed = false;
        if (opts.anderson && !dF.empty()) {
            const auto m = static_cast<Eigen::Index>(dF.size());
            Eigen::MatrixXd A(static_cast<Eigen::Index>(n - 1), m);
            Eigen::VectorXd b(static_cast<Eigen::Index>(n - 1));
            for (std::size_t i = 1; i < n; ++i) {
                const double s = 1.0 / (1.0 + x[i]);
                const auto row = static_cast<Eigen::Index>(i - 1);
                b(row) = s * f[i];
                for (Eigen::Index k = 0; k < m; ++k) A(row, k) = s * dF[static_cast<std::size_t>(k)][i];
            }
            const Eigen::VectorXd gamma = A.colPivHouseholderQr().solve(b);
            for (std::size_t i = 0; i < n; ++i) {
                double c = x[i] + alpha * f[i];
                for (Eigen::Index k = 0; k < m; ++k) {
                    const auto kk = static_cast<std::size_t>(k);
                    c -= gamma(k) * (dX[kk][i] + alpha * dF[kk][i]);
                }
                cand[i] = std::max(c, 0.0);
            }
            mixed = gamma.allFinite();
        }
        if (!mixed) {
            for (std::size_t i = 0; i < n; ++i) cand[i] = x[i] + alpha * f[i];
        }
        cand[0] = cand[1];
        check(cand);

        const double F0 = ex.functional();
        const double slack = kDescentSlack * std::abs(F0);
        Evaluation ec = evaluate(cand, V, prob, gas, true);
        if (!(ec.functional() <= F0 + slack)) {
            // Fall back to a plain damped step along the descent direction.
            dX.clear();
            dF.clear();
            double step = mixed ? alpha : 0.5 * alpha;
            bool accepted = false;
            while (step > 1e-12) {
                for (std::size_t i = 0; i < n; ++i) cand[i] = x[i] + step * f[i];
                ec = evaluate(cand, V, prob, gas, true);
                if (ec.functional() <= F0 + slack) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
        }

        std::vector<double> fc = residual_of(cand, ec);
        if (opts.anderson) {
            std::vector<double> dx(n), df(n);
            for (std::size_t i = 0; i < n; ++i) {
                dx[i] = cand[i] - x[i];
                df[i] = fc[i] - f[i];
            }
            dX.push_back(std::move(dx));
            dF.push_back(std::move(df));
            if (static_cast<int>(dF.size()) > opts.anderson_depth) {
                dX.pop_front();
                dF.pop_front();
            }
        }
        x = std::move(cand);
        f = std::move(fc);
        ex = std::move(ec);
    }

    rep.density = DensityField(prob.grid, x);
    rep.functional_terms = FunctionalTerms{ex.pressure_integral, ex.hartree};
    rep.pressure = ex.functional();
    rep.hartree = ex.hartree;
    rep.particle_number = rep.density.total();
    return rep;
}

// ---------------------------------------------------------------- duality

double free_energy_density(double rho, double T, double B) { return LocalGas::plain(T, B).free_energy(rho); }

double eval_free_energy_functional(const DensityField& rho, const ScaledProblem& prob) {
    prob.validate();
    rho.validate();
    const auto gas = prob.gas();
    const auto V = external_values(prob);
    const auto& g = *prob.grid;
    double s = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (rho.values[i] == 0.0) continue;
        s += g.w(i) * (gas.free_energy(rho.values[i]) + V[i] * rho.values[i]);
    }
    return s + fields::hartree_energy(rho);
}

double eval_unscaled_pressure_functional(const DensityField& rho, const PhysicalParams& params) {
    rho.validate();
    if (!(params.T > 0.0)) throw DomainError("temperature must be > 0");
    const auto V = fields::external_potential(params, rho.grid);
    const auto v = fields::coulomb_potential(rho);
    const auto gas = LocalGas::plain(params.T, params.B);
    const auto& g = *rho.grid;
    double pint = 0.0;
    double hartree = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        pint += g.w(i) * gas.pressure(params.mu - V.values[i] - v.values[i]);
        hartree += g.w(i) * rho.values[i] * v.values[i];
    }
    const double total = pint + 0.5 * hartree;
    if (!std::isfinite(total)) {
        throw RangeError("unscaled functional overflows; evaluate in scaled variables instead");
    }
    return total;
}

ExchangeCorrection exchange_correction(const DensityField& rho, double gamma, double Z, double beta) {
    if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
    if (!(Z > 0.0)) throw DomainError("Z must be > 0");
    if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
    rho.validate();
    const auto& g = *rho.grid;
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.w(i) * std::pow(rho.values[i], 5.0 / 3.0);
    const double p = std::pow(1.0 + beta, 0.4);
    return ExchangeCorrection{3.0 / (5.0 * gamma) * s, 3.68 * gamma, p / gamma,
                              gamma / (std::pow(Z, 4.0 / 3.0) * p)};
}

}  // namespace mtf
