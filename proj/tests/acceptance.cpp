// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.

#include "oracles.hpp"

#include "mtf/eos.hpp"
#include "mtf/fermi.hpp"
#include "mtf/fields.hpp"
#include "mtf/mtf.hpp"
#include "mtf/scaling.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace mtf;

namespace {

constexpr double kFermiTol = 1e-10;
constexpr double kFermiSeconds = 5.0;
constexpr double kConsistencyTol = 1e-6;
constexpr double kConsistencySeconds = 10.0;
constexpr double kFormTol = 1e-8;
constexpr double kBallTol = 1e-6;
constexpr double kNewtonTol = 1e-10;
// max of |v|_6^2 / D over oracle::family on uniform(24, 12001), measured once.
constexpr double kSobolevCalibrated = 4.5546;
constexpr double kRescaleTol = 1e-8;
constexpr double kUlpTol = 4.0;
constexpr double kResidualTol = 1e-6;
constexpr double kDampingTol = 1e-6;
constexpr double kMinOrder = 1.0;
constexpr double kSolveSeconds = 120.0;
constexpr double kLegendreTol = 1e-6;
constexpr double kDualityTol = 1e-5;
constexpr double kFinalGapTol = 1e-2;
constexpr double kLimitSeconds = 900.0;
constexpr double kConvexityTol = 1e-10;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ScaledProblem reference_problem(double beta, std::size_t n = 2000) {
    ScaledProblem p;
    p.mu_tilde = 0.0;
    p.T_tilde = 0.5;
    p.z = 1.0;
    p.beta = Beta::finite(beta);
    p.grid = default_grid(p.mu_tilde, p.T_tilde, p.W, n);
    return p;
}

// ------------------------------------------------------------------ 1

void fermi_accuracy(Outcome& o) {
    const auto t0 = Clock::now();
    using fermi::Order;
    const Order orders[] = {Order::minus_half(), Order::half(), Order::one(), Order::three_halves()};
    const double xs[] = {-45.0, -12.0, -5.0, -4.99, -1.3, 0.0, 0.4, 2.5, 4.99, 5.0, 11.0, 29.9, 30.0, 75.0, 900.0};
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
        const auto k = orders[i % 4];
        const double x = xs[i % 15];
        const double ref = static_cast<double>(oracle::fermi(k.value(), x));
        worst = std::max(worst, rel(fermi::integral(k, x), ref));
    }
    double anchor = rel(fermi::integral(Order::one(), 0.0), std::numbers::pi * std::numbers::pi / 12.0);
    for (auto k : {Order::minus_half(), Order::half(), Order::three_halves()}) {
        const double kv = k.value();
        anchor = std::max(anchor, rel(fermi::integral(k, 0.0), boost::math::tgamma(kv + 1) * oracle::eta(kv + 1)));
    }
    const double dt = seconds_since(t0);
    o.detail << "max rel err (30 samples) " << worst << ", anchors " << anchor << ", " << dt << " s";
    o.require(worst <= kFermiTol, "sample error");
    o.require(anchor <= kFermiTol, "anchor error");
    o.require(dt < kFermiSeconds, "runtime");
}

// ------------------------------------------------------------------ 2

void thermodynamic_consistency(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mu_d(-20.0, 40.0), logT(std::log(0.05), std::log(10.0)), B_d(0.0, 100.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const eos::GasState s{mu_d(rng), std::exp(logT(rng)), B_d(rng)};
        const double h = 1e-4 * s.T;
        const double fd =
            (eos::landau_pressure({s.mu + h, s.T, s.B}) - eos::landau_pressure({s.mu - h, s.T, s.B})) / (2 * h);
        worst = std::max(worst, rel(fd, eos::landau_density(s)));
    }
    const double dt = seconds_since(t0);
    o.detail << "max |P' - FD|/P' over 20 states " << worst << ", " << dt << " s";
    o.require(worst <= kConsistencyTol, "consistency");
    o.require(dt < kConsistencySeconds, "runtime");
}

// ------------------------------------------------------------------ 3

void form_equivalence(Outcome& o) {
    const eos::GasState states[] = {{0.0, 1.0, 1.0},  {1.0, 1.0, 1.0},   {5.0, 0.5, 0.3},  {-2.0, 2.0, 4.0},
                                    {20.0, 0.1, 3.0}, {50.0, 5.0, 10.0}, {3.0, 0.05, 0.7}, {-10.0, 1.0, 50.0},
                                    {100.0, 2.0, 0.5}, {8.0, 1.0, 0.0}};
    double worst = 0.0;
    for (const auto& s : states) worst = std::max(worst, rel(eos::landau_pressure(s), eos::dos_pressure(s)));
    o.detail << "max rel gap Landau sum vs DOS quadrature " << worst;
    o.require(worst <= kFormTol, "form gap");
}

// ------------------------------------------------------------------ 4

void sandwich(Outcome& o) {
    int violations = 0;
    double tightest = std::numeric_limits<double>::infinity();
    for (double mu : {-10.0, -1.0, 0.5, 5.0, 50.0}) {
        for (double T : {0.01, 0.1, 1.0, 5.0, 20.0}) {
            for (double B : {0.0, 0.1, 1.0, 10.0, 100.0}) {
                const eos::GasState s{mu, T, B};
                for (const auto& r : {eos::pressure_bounds(s), eos::density_bounds(s)}) {
                    if (!r.contained()) ++violations;
                    tightest = std::min({tightest, r.value / r.lower, r.upper / r.value});
                }
            }
        }
    }
    o.detail << "violations " << violations << " of 250 (P and P'), min margin factor " << tightest;
    o.require(violations == 0, "violations");
}

// ------------------------------------------------------------------ 5

void coulomb_oracles(Outcome& o) {
    auto g = fields::make_grid(fields::RadialGrid::uniform(4.0, 16001));
    const fields::DensityField rho(g, oracle::ball(*g, 1.0, 1.0).values);
    const auto v = fields::coulomb_potential(rho);
    const double ball_err = std::max({rel(v.values[0], 1.5), rel(v.values[2000], 1.375),
                                      rel(fields::hartree_energy(rho), 0.6)});
    double newton = 0.0;
    const double Q = rho.total();
    for (std::size_t i = 4000; i < g->size(); i += 1000) newton = std::max(newton, rel(v.values[i] * g->r(i), Q));

    auto fg = fields::make_grid(fields::RadialGrid::uniform(24.0, 12001));
    double worst_ratio = 0.0;
    for (const auto& d : oracle::family(*fg)) {
        const fields::DensityField f(fg, d.values);
        const double n6 = fields::lp_norm(fields::coulomb_potential(f), 6.0);
        worst_ratio = std::max(worst_ratio, n6 * n6 / fields::hartree_energy(f));
    }
    o.detail << "ball rel err " << ball_err << ", Newton " << newton << ", max |v|_6^2/D " << worst_ratio
             << " (limit " << 2 * kSobolevCalibrated << ")";
    o.require(ball_err <= kBallTol, "ball");
    o.require(newton <= kNewtonTol, "Newton");
    o.require(worst_ratio <= 2 * kSobolevCalibrated, "Sobolev ratio");
}

// ------------------------------------------------------------------ 6

void scaling_exactness(Outcome& o) {
    double worst = 0.0;
    for (auto [Z, beta] : {std::pair{1.0, 0.0}, std::pair{2.0, 1.0}, std::pair{10.0, 0.0}}) {
        PhysicalParams p;
        p.Z = Z;
        p.B = beta * std::pow(Z, 4.0 / 3.0);
        const auto s0 = scaling::scale_params(p);
        p.T = 0.5 * s0.energy;
        p.mu = 0.0;
        const auto s = scaling::scale_params(p);
        auto prob = reference_problem(s.beta, 800);
        prob.T_tilde = s.T_tilde;
        const auto rep = scf_solve(prob);
        const auto check = scaling::pressure_rescale_check(rep.density, p);
        worst = std::max(worst, check.discrepancy);
        o.detail << "(Z=" << Z << ",beta=" << beta << ") " << check.discrepancy << "; ";
    }
    o.require(worst <= kRescaleTol, "rescale discrepancy");
}

// ------------------------------------------------------------------ 7

double ulps(double a, double b) {
    if (a == b) return 0.0;
    const double m = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) / (std::nextafter(m, HUGE_VAL) - m);
}

void algebraic_identities(Outcome& o) {
    double worst_hb = 0.0, worst_h3 = 0.0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            PhysicalParams p;
            p.Z = std::pow(10.0, 3.0 * i / 9.0);
            p.B = std::pow(10.0, -2.0 + 10.0 * j / 9.0);
            const auto s = scaling::scale_params(p);
            const long double beta = static_cast<long double>(p.B) / std::pow(static_cast<long double>(p.Z), 4.0L / 3.0L);
            const long double h3 = std::pow(1.0L + beta, 0.6L) / p.Z;
            worst_hb = std::max(worst_hb, ulps(s.h * s.b, s.B_tilde));
            worst_h3 = std::max(worst_h3, ulps(s.h * s.h * s.h, static_cast<double>(h3)));
        }
    }
    o.detail << "max ulp h*b vs B~ " << worst_hb << ", h^3 " << worst_h3;
    o.require(worst_hb <= kUlpTol && worst_h3 <= kUlpTol, "ulp distance");
}

// ------------------------------------------------------------------ 8, 9

struct ReferenceSolve {
    ScaledProblem prob;
    SolveReport rep;
    double seconds = 0.0;
};

const ReferenceSolve& reference_solve() {
    static const ReferenceSolve ref = [] {
        ReferenceSolve r;
        r.prob = reference_problem(1.0);
        const auto t0 = Clock::now();
        r.rep = scf_solve(r.prob);
        r.seconds = seconds_since(t0);
        return r;
    }();
    return ref;
}

void solver_correctness(Outcome& o) {
    const auto& ref = reference_solve();
    const auto& prob = ref.prob;
    const double residual = tf_residual(ref.rep.density, prob).sup_norm;

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> centre(0.0, 3.0), width(0.05, 0.8), sign(-1.0, 1.0);
    const double peak = *std::max_element(ref.rep.density.values.begin(), ref.rep.density.values.end());
    int worse = 0;
    double smallest_rise = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
        const double c = centre(rng), w = width(rng), eps = 1e-3 * peak * sign(rng);
        auto v = ref.rep.density.values;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double t = (prob.grid->r(i) - c) / w;
            if (std::abs(t) < 1.0) v[i] = std::max(0.0, v[i] + eps * std::exp(-1.0 / (1.0 - t * t)));
        }
        const double F = eval_pressure_functional(fields::DensityField(prob.grid, v), prob);
        smallest_rise = std::min(smallest_rise, F - ref.rep.pressure);
        if (F < ref.rep.pressure) ++worse;
    }

    SolveOptions slow;
    slow.damping = 0.3;
    const auto alt = scf_solve(prob, slow);
    const double damping_gap = rel(alt.pressure, ref.rep.pressure);

    double coarse[2];
    for (int j = 0; j < 2; ++j) coarse[j] = scf_solve(reference_problem(1.0, j == 0 ? 500 : 1000)).pressure;
    const double order = std::log2(std::abs(coarse[0] - coarse[1]) / std::abs(coarse[1] - ref.rep.pressure));

    o.detail << "residual " << residual << ", perturbations below minimum " << worse << "/20 (min rise "
             << smallest_rise << "), damping 0.3 vs 0.5 " << damping_gap << ", mesh order " << order << ", solve "
             << ref.seconds << " s";
    o.require(ref.rep.converged && alt.converged, "convergence");
    o.require(residual <= kResidualTol, "residual");
    o.require(worse == 0, "minimality");
    o.require(damping_gap <= kDampingTol, "damping invariance");
    o.require(order >= kMinOrder, "mesh order");
    o.require(ref.seconds < kSolveSeconds, "runtime");
}

void legendre_duality(Outcome& o) {
    double worst = 0.0;
    for (const auto& gas : {LocalGas::plain(1.0, 1.0), LocalGas::plain(0.2, 0.0), LocalGas::scaled(0.5, Beta::finite(3.0)),
                            LocalGas::lowest_level(1.0)}) {
        for (double mu = -20.0; mu <= 40.0; mu += 2.5) {
            worst = std::max(worst, std::abs(gas.chemical_potential(gas.density(mu)) - mu) / std::max(1.0, std::abs(mu)));
        }
    }
    const auto& ref = reference_solve();
    const double F = eval_free_energy_functional(ref.rep.density, ref.prob);
    const double dual = ref.prob.mu_tilde * ref.rep.particle_number - ref.rep.pressure;
    const double gap = rel(F, dual);
    o.detail << "max |f'(P'(mu)) - mu| " << worst << ", F vs mu N - P " << gap;
    o.require(worst <= kLegendreTol, "Legendre");
    o.require(gap <= kDualityTol, "duality");
}

// ------------------------------------------------------------------ 10

bool strictly_decreasing(const scaling::ScanResult& s) {
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
        if (!(s.rows[i].rel_gap < s.rows[i - 1].rel_gap)) return false;
    }
    return true;
}

void limit_convergence(Outcome& o) {
    const auto t0 = Clock::now();
    const auto base = reference_problem(0.0);
    const auto up = scaling::limit_scan(base, {1e2, 1e4, 1e6}, scaling::LimitMode::beta_to_infinity);
    const auto down = scaling::limit_scan(base, {1.0, 0.1, 0.01}, scaling::LimitMode::beta_to_zero);
    const double dt = seconds_since(t0);
    o.detail << "beta->inf gaps";
    for (const auto& r : up.rows) o.detail << ' ' << r.rel_gap;
    o.detail << "; beta->0 gaps";
    for (const auto& r : down.rows) o.detail << ' ' << r.rel_gap;
    o.detail << "; " << dt << " s";
    o.require(up.all_ok() && down.all_ok(), "scan solves");
    o.require(strictly_decreasing(up), "beta->inf monotone");
    o.require(strictly_decreasing(down), "beta->0 monotone");
    o.require(!up.rows.empty() && up.rows.back().rel_gap <= kFinalGapTol, "final gap");
    o.require(dt < kLimitSeconds, "runtime");
}

// ------------------------------------------------------------------ 11

void minimizer_bounds(Outcome& o) {
    int violations = 0;
    double n_min = std::numeric_limits<double>::infinity(), n_max = 0.0;
    const Beta betas[] = {Beta::finite(0.0), Beta::finite(1.0), Beta::finite(1e2), Beta::finite(1e4), Beta::infinite()};
    for (const auto& beta : betas) {
        auto prob = reference_problem(0.0);
        prob.beta = beta;
        const auto rep = scf_solve(prob);
        if (!rep.converged) ++violations;
        const auto zero = fields::DensityField::zero(prob.grid);
        const double F0 = eval_pressure_functional(zero, prob);
        const auto ext = fields::scaled_external_potential(prob.z, prob.W, prob.grid);
        const auto gas = prob.gas();
        double n_bound = 0.0;
        for (std::size_t i = 1; i < prob.grid->size(); ++i) {
            n_bound += prob.grid->w(i) * gas.density(prob.mu_tilde - ext.values[i]);
        }
        const double D = rep.hartree;
        const double N = rep.density.total();
        if (!(D <= F0)) ++violations;
        if (!(N <= n_bound)) ++violations;
        n_min = std::min(n_min, N);
        n_max = std::max(n_max, N);
        o.detail << "beta=";
        if (beta.is_infinite()) {
            o.detail << "inf";
        } else {
            o.detail << beta.value();
        }
        o.detail << ": D/F0 " << D / F0 << " N/bound " << N / n_bound << " |rho|_3/2 "
                 << fields::lp_norm(rep.density, 1.5) << "; ";
    }
    o.detail << "violations " << violations;
    o.require(violations == 0, "bounds");
}

// ------------------------------------------------------------------ 12

void convexity(Outcome& o) {
    const auto prob = reference_problem(1.0, 600);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> centre(0.0, 3.0), width(0.1, 1.5), amp(0.0, 0.3);
    auto random_density = [&] {
        std::vector<double> v(prob.grid->size(), 0.0);
        for (int b = 0; b < 3; ++b) {
            const double c = centre(rng), w = width(rng), a = amp(rng);
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double t = (prob.grid->r(i) - c) / w;
                v[i] += a * std::exp(-t * t);
            }
        }
        return v;
    };
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10; ++k) {
        const auto a = random_density(), b = random_density();
        std::vector<double> m(a.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
        const double Fa = eval_pressure_functional(fields::DensityField(prob.grid, a), prob);
        const double Fb = eval_pressure_functional(fields::DensityField(prob.grid, b), prob);
        const double Fm = eval_pressure_functional(fields::DensityField(prob.grid, m), prob);
        const double avg = 0.5 * (Fa + Fb);
        worst = std::max(worst, (Fm - avg) / std::max(1.0, std::abs(avg)));
    }
    o.detail << "max (F(mid) - mean)/max(1,|mean|) " << worst;
    o.require(worst <= kConvexityTol, "midpoint convexity");
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
        {"fermi integral accuracy", fermi_accuracy},
        {"thermodynamic consistency", thermodynamic_consistency},
        {"form equivalence", form_equivalence},
        {"sandwich estimates", sandwich},
        {"coulomb oracles", coulomb_oracles},
        {"scaling exactness", scaling_exactness},
        {"algebraic identities", algebraic_identities},
        {"solver correctness", solver_correctness},
        {"legendre duality", legendre_duality},
        {"limit convergence", limit_convergence},
        {"uniform minimizer bounds", minimizer_bounds},
        {"convexity battery", convexity},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Outcome o;
        o.detail.precision(3);
        try {
            run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        if (!o.pass) ++failed;
        std::printf("%s  %2d %-27s %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d/12 criteria passed\n", 12 - failed);
    return failed == 0 ? 0 : 1;
}
