#include "mtf/eos.hpp"

#include "mtf/errors.hpp"
#include "mtf/fermi.hpp"
#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace mtf::eos {

namespace {

using fermi::Order;
using std::numbers::pi;

// Below this argument the remaining levels are summed in closed form.
constexpr double kGeometricEdge = -5.0;
// Euler-Maclaurin over all nu >= 1 when the level spacing 2B/T is below this.
constexpr double kSmoothSpacing = 0.5;
// Deep levels (x above this) are smooth in nu and summed by Euler-Maclaurin.
constexpr double kDeepEdge = 30.0;
constexpr int kMinDeepBlock = 20;

// Two-sided estimate constants from tools/calibrate_bounds.cpp (extremes
// 0.0708, 0.494 for P and 0.106, 0.335 for P'), widened by 2.
constexpr double kPressureLower = 0.035;
constexpr double kPressureUpper = 0.99;
constexpr double kDensityLower = 0.053;
constexpr double kDensityUpper = 0.67;

// B_{2j} / (2j)!, j = 1..6
constexpr std::array<double, 6> kBernoulliOverFactorial = {
    1.0 / 12.0,          -1.0 / 720.0,          1.0 / 30240.0,
    -1.0 / 1209600.0,    1.0 / 47900160.0,      -691.0 / 1307674368000.0,
};

void check_state(const GasState& s) {
    if (!std::isfinite(s.mu)) throw DomainError("chemical potential must be finite");
    if (!(s.T > 0.0) || !std::isfinite(s.T)) throw DomainError("temperature must be > 0");
    if (!(s.B >= 0.0) || !std::isfinite(s.B)) throw DomainError("field strength must be >= 0");
}

// I_{k+1}(x) / (k+1): antiderivative of I_k.
double antiderivative(Order k, double x) {
    const Order up = k.raised();
    return fermi::integral(up, x) / up.value();
}

// sum_{nu>=0} I_k(x - lambda nu) with x <= kGeometricEdge, from the
// exponential series of I_k summed over nu in closed form.
double geometric_tail(Order k, double x, double lambda) {
    const double q = k.value() + 1.0;
    const double e = std::exp(x);
    double pw = e;
    double sum = 0.0;
    for (int n = 1; n < 400; ++n) {
        const double term = pw / (std::pow(static_cast<double>(n), q) * -std::expm1(-n * lambda));
        sum += (n % 2 == 1) ? term : -term;
        if (term <= 1e-17 * std::abs(sum)) break;
        pw *= e;
        if (pw == 0.0) break;
    }
    return fermi::gamma_k_plus_one(k) * sum;
}

// Endpoint correction sum_j B_{2j}/(2j)! g^{(2j-1)} for g(nu) = I_k(x - lambda nu).
double em_endpoint(Order k, double x, double lambda) {
    const auto d = fermi::integral_derivatives(k, x, 11);
    double corr = 0.0;
    double lam_pow = lambda;  // (-lambda)^{2j-1} = -lambda^{2j-1}
    for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
        corr += kBernoulliOverFactorial[j] * (-lam_pow) * d[2 * j];
        lam_pow *= lambda * lambda;
    }
    return corr;
}

// sum_{nu = 0}^{n} I_k(x - lambda nu) by Euler-Maclaurin; n = -1 means infinity.
double em_block(Order k, double x, double lambda, long n) {
    if (n < 0) {
        return antiderivative(k, x) / lambda + 0.5 * fermi::integral(k, x) - em_endpoint(k, x, lambda);
    }
    const double xe = x - lambda * static_cast<double>(n);
    const double integral = (antiderivative(k, x) - antiderivative(k, xe)) / lambda;
    const double ends = 0.5 * (fermi::integral(k, x) + fermi::integral(k, xe));
    return integral + ends + em_endpoint(k, xe, lambda) - em_endpoint(k, x, lambda);
}

// sum_{nu >= 0} I_k(x - lambda nu), lambda > 0.
double level_sum(Order k, double x, double lambda) {
    if (x <= kGeometricEdge) return geometric_tail(k, x, lambda);
    if (lambda < kSmoothSpacing) return em_block(k, x, lambda, -1);

    double sum = 0.0;
    const double deep_edge = std::max(kDeepEdge, 10.0 * lambda);
    if (x > deep_edge) {
        const auto n_deep = static_cast<long>(std::floor((x - deep_edge) / lambda));
        if (n_deep >= kMinDeepBlock) {
            sum += em_block(k, x, lambda, n_deep);
            x -= lambda * static_cast<double>(n_deep + 1);
        }
    }
    while (x > kGeometricEdge) {
        sum += fermi::integral(k, x);
        x -= lambda;
    }
    return sum + geometric_tail(k, x, lambda);
}

// I_k(x0) + 2 sum_{nu >= 1} I_k(x0 - lambda nu)
double landau_bracket(Order k, double x0, double lambda) {
    return fermi::integral(k, x0) + 2.0 * level_sum(k, x0 - lambda, lambda);
}

}  // namespace

double degeneracy(int nu, double B) {
    if (nu < 0) throw DomainError("Landau index must be >= 0");
    return nu == 0 ? B / (2.0 * pi) : B / pi;
}

double landau_pressure(const GasState& s) {
    check_state(s);
    const double x0 = s.mu / s.T;
    if (s.B == 0.0) {
        return 2.0 / (3.0 * pi) * std::pow(s.T, 2.5) * fermi::integral(Order::three_halves(), x0);
    }
    const double pref = s.B * std::pow(s.T, 1.5) / pi;
    return pref * landau_bracket(Order::half(), x0, 2.0 * s.B / s.T);
}

double landau_density(const GasState& s) {
    check_state(s);
    const double x0 = s.mu / s.T;
    if (s.B == 0.0) {
        return std::pow(s.T, 1.5) / pi * fermi::integral(Order::half(), x0);
    }
    const double pref = s.B * std::sqrt(s.T) / (2.0 * pi);
    return pref * landau_bracket(Order::minus_half(), x0, 2.0 * s.B / s.T);
}

double integrated_dos(double eps, double B) {
    if (!(eps >= 0.0) || !(B >= 0.0)) throw DomainError("integrated_dos needs eps >= 0 and B >= 0");
    if (B == 0.0) return 2.0 / (3.0 * pi) * std::pow(eps, 1.5);
    double sum = std::sqrt(eps);
    for (long nu = 1; 2.0 * B * static_cast<double>(nu) < eps; ++nu) {
        sum += 2.0 * std::sqrt(eps - 2.0 * B * static_cast<double>(nu));
    }
    return B / pi * sum;
}

double dos_pressure(const GasState& s) {
    check_state(s);
    const double eps_max = std::max(s.mu, 0.0) + 60.0 * s.T;
    auto occupation = [&](double eps) { return detail::fermi_factor((eps - s.mu) / s.T); };
    constexpr double kTol = 1e-13;

    if (s.B == 0.0) {
        auto f = [&](double eps) { return integrated_dos(eps, 0.0) * occupation(eps); };
        if (s.mu > 0.0) return detail::adaptive(f, 0.0, s.mu, kTol) + detail::adaptive(f, s.mu, eps_max, kTol);
        return detail::adaptive(f, 0.0, eps_max, kTol);
    }

    // On [2B nu, 2B (nu+1)] substitute eps = 2B nu + t^2 to absorb the square-root
    // onset of the newest level; the older levels are smooth there.
    const double gap = 2.0 * s.B;
    double total = 0.0;
    for (long nu = 0; gap * static_cast<double>(nu) < eps_max; ++nu) {
        const double base = gap * static_cast<double>(nu);
        auto g = [&](double t) {
            const double eps = base + t * t;
            return 2.0 * t * integrated_dos(eps, s.B) * occupation(eps);
        };
        const double t_end = std::sqrt(gap);
        if (s.mu > base && s.mu < base + gap) {
            const double t_mu = std::sqrt(s.mu - base);
            total += detail::adaptive(g, 0.0, t_mu, kTol) + detail::adaptive(g, t_mu, t_end, kTol);
        } else {
            total += detail::adaptive(g, 0.0, t_end, kTol);
        }
    }
    return total;
}

double lll_pressure(double mu, double T) {
    if (!(T > 0.0)) throw DomainError("temperature must be > 0");
    if (!std::isfinite(mu)) throw DomainError("chemical potential must be finite");
    return std::pow(T, 1.5) / pi * fermi::integral(Order::half(), mu / T);
}

double lll_density(double mu, double T) {
    if (!(T > 0.0)) throw DomainError("temperature must be > 0");
    if (!std::isfinite(mu)) throw DomainError("chemical potential must be finite");
    return std::sqrt(T) / (2.0 * pi) * fermi::integral(Order::minus_half(), mu / T);
}

double zero_t_pressure(double mu, double B) {
    if (!(B >= 0.0)) throw DomainError("field strength must be >= 0");
    if (!std::isfinite(mu)) throw DomainError("chemical potential must be finite");
    if (mu <= 0.0) return 0.0;
    if (B == 0.0) return 4.0 / (15.0 * pi) * std::pow(mu, 2.5);
    double sum = 0.0;
    for (int nu = 0; 2.0 * B * nu < mu; ++nu) {
        sum += degeneracy(nu, B) * (4.0 / 3.0) * std::pow(mu - 2.0 * B * nu, 1.5);
    }
    return sum;
}

BoundTerms pressure_bound_terms(const GasState& s) {
    check_state(s);
    const double m = std::max(s.mu, 0.0);
    return BoundTerms{s.B * std::pow(m, 1.5), std::pow(m, 2.5),
                      std::exp(-std::abs(s.mu) / s.T) * (s.B * std::pow(s.T, 1.5) + std::pow(s.T, 2.5))};
}

BoundTerms density_bound_terms(const GasState& s) {
    check_state(s);
    const double m = std::max(s.mu, 0.0);
    return BoundTerms{s.B * std::sqrt(m), std::pow(m, 1.5),
                      std::exp(-std::abs(s.mu) / s.T) * (s.B * std::sqrt(s.T) + std::pow(s.T, 1.5))};
}

BoundConstants pressure_bound_constants() {
    // Extremes of P / terms over the calibration grid, widened by 2.
    return BoundConstants{kPressureLower, kPressureUpper};
}

BoundConstants density_bound_constants() {
    return BoundConstants{kDensityLower, kDensityUpper};
}

BoundsReport pressure_bounds(const GasState& s) {
    BoundsReport r;
    r.terms = pressure_bound_terms(s);
    r.value = landau_pressure(s);
    const auto c = pressure_bound_constants();
    r.lower = c.lower * (r.terms.field + r.terms.bulk);
    r.upper = c.upper * (r.terms.field + r.terms.bulk + r.terms.tail);
    return r;
}

BoundsReport density_bounds(const GasState& s) {
    BoundsReport r;
    r.terms = density_bound_terms(s);
    r.value = landau_density(s);
    const auto c = density_bound_constants();
    r.lower = c.lower * (r.terms.field + r.terms.bulk);
    r.upper = c.upper * (r.terms.field + r.terms.bulk + r.terms.tail);
    return r;
}

}  // namespace mtf::eos
