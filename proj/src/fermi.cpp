#include "mtf/fermi.hpp"

#include "mtf/errors.hpp"
#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace mtf::fermi {

namespace {

using std::numbers::pi;

constexpr double kSeriesEdge = -5.0;
constexpr double kSommerfeldEdge = 5.0;
constexpr double kPureAsymptoticEdge = 30.0;
// Beyond this distance from the Fermi edge the occupation is below e^-70.
constexpr double kTailWidth = 70.0;

// Falling factorial k (k-1) ... (k-n+1).
double falling(double k, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= k - i;
    return r;
}

constexpr int kMaxSeriesTerms = 40;

// eta(2m) = (1 - 2^{1-2m}) zeta(2m), m = 1..kMaxSeriesTerms
double eta_even(int m) {
    static const auto table = [] {
        std::array<double, kMaxSeriesTerms + 1> t{};
        for (int j = 1; j <= kMaxSeriesTerms; ++j) {
            t[j] = (1.0 - std::ldexp(1.0, 1 - 2 * j)) * std::riemann_zeta(2.0 * j);
        }
        return t;
    }();
    return table[m];
}

double series_branch(Order k, double x) {
    const double q = k.value() + 1.0;
    const double e = std::exp(x);
    double pw = e;
    double sum = 0.0;
    for (int n = 1; n < 400; ++n) {
        const double term = pw / std::pow(static_cast<double>(n), q);
        sum += (n % 2 == 1) ? term : -term;
        if (term <= 1e-17 * sum) break;
        pw *= e;
        if (pw == 0.0) break;
    }
    return gamma_k_plus_one(k) * sum;
}

double quadrature_branch(Order k, double x) {
    // y = t^2:  I_k = \int 2 t^{2k+1} / (e^{t^2 - x} + 1) dt.  The integrand is
    // a polynomial times the occupation, whose poles stay >= 0.6 from the real
    // t axis for |x| < 5, so panels of width 1/2 suffice.
    const int p = k.twice() + 1;
    const double t_max = std::sqrt(std::max(x, 0.0) + kTailWidth);
    double r = 0.0;
    detail::composite_gauss(0.0, t_max, static_cast<std::size_t>(std::ceil(2.0 * t_max)),
                            [&](double t, double w) {
                                double tp = 1.0;
                                for (int i = 0; i < p; ++i) tp *= t;
                                r += w * 2.0 * tp * detail::fermi_factor(t * t - x);
                            });
    return r;
}

// Odd Taylor polynomial of (x+u)^k - (x-u)^k through u^{2M-1}.
struct OddTaylor {
    static constexpr int kTerms = 3;
    std::array<double, kTerms> coeff{};

    OddTaylor(double k, double x) {
        double fact = 1.0;
        for (int m = 1; m <= kTerms; ++m) {
            const int j = 2 * m - 1;
            if (j > 1) fact *= static_cast<double>(j) * (j - 1);
            coeff[m - 1] = 2.0 * falling(k, j) / fact * std::pow(x, k - j);
        }
    }

    double operator()(double u) const {
        const double u2 = u * u;
        return u * (coeff[0] + u2 * (coeff[1] + u2 * coeff[2]));
    }
};

double sommerfeld_with_remainder(Order k, double x, const SommerfeldTable& table) {
    const double kv = k.value();
    const OddTaylor taylor(kv, x);

    double s = std::pow(x, kv + 1.0) / (kv + 1.0);
    for (int m = 1; m <= OddTaylor::kTerms; ++m) {
        s += 2.0 * falling(kv, 2 * m - 1) * table.eta_even[m - 1] * std::pow(x, kv + 1.0 - 2 * m);
    }

    // Exact remainder
    //   R = \int_0^inf [(x+u)^k - (x-u)_+^k - T(u)] / (e^u + 1) du
    // split into [0, x-1], [x-1, x] (u = x - s^2) and [x, inf).  Every piece
    // is analytic in a strip of half-width pi, so fixed Gauss panels of width
    // <= 2 converge far below double precision.
    double r = 0.0;
    const double inner_hi = std::min(x - 1.0, 60.0);
    detail::composite_gauss(0.0, inner_hi, static_cast<std::size_t>(std::ceil(inner_hi / 2.0)),
                            [&](double u, double w) {
                                const double h = std::pow(x + u, kv) - std::pow(x - u, kv) - taylor(u);
                                r += w * h * detail::fermi_factor(u);
                            });
    if (x - 1.0 <= 60.0) {
        detail::composite_gauss(0.0, 1.0, 2, [&](double sv, double w) {
            const double u = x - sv * sv;
            const double smooth = (std::pow(x + u, kv) - taylor(u)) * 2.0 * sv;
            const double edge = 2.0 * std::pow(sv, 2.0 * kv + 1.0);
            r += w * (smooth - edge) * detail::fermi_factor(u);
        });
        detail::composite_gauss(x, x + 50.0, 25, [&](double u, double w) {
            r += w * (std::pow(x + u, kv) - taylor(u)) * detail::fermi_factor(u);
        });
    }
    return s + r;
}

double pure_sommerfeld(Order k, double x, const SommerfeldTable& table) {
    const double kv = k.value();
    double sum = std::pow(x, kv + 1.0) / (kv + 1.0);
    double prev = HUGE_VAL;
    for (int m = 1; m <= kMaxSeriesTerms; ++m) {
        const double eta = (m <= 3) ? table.eta_even[m - 1] : eta_even(m);
        const double term = 2.0 * falling(kv, 2 * m - 1) * eta * std::pow(x, kv + 1.0 - 2 * m);
        if (term == 0.0) break;  // integer order: series terminates
        if (std::abs(term) > std::abs(prev)) break;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        prev = term;
    }
    return sum;
}

// sigma^{(n)}(t) = s (1 - s) Q_n(s), s = 1/(1+e^{-t}); coefficients of Q_n.
constexpr int kMaxDerivative = 13;

struct DerivativePolys {
    std::array<std::array<double, kMaxDerivative + 1>, kMaxDerivative + 1> c{};

    DerivativePolys() {
        c[1][0] = 1.0;
        // Q_{n+1} = (1 - 2s) Q_n + s (1 - s) Q_n'
        for (int n = 1; n < kMaxDerivative; ++n) {
            auto& next = c[n + 1];
            const auto& q = c[n];
            for (int i = 0; i < n; ++i) {
                next[i] += q[i];
                next[i + 1] -= 2.0 * q[i];
                if (i >= 1) {
                    next[i] += i * q[i];
                    next[i + 1] -= i * q[i];
                }
            }
        }
    }
};

const DerivativePolys& derivative_polys() {
    static const DerivativePolys polys;
    return polys;
}

}  // namespace

Order Order::from_value(double k) {
    if (k == -0.5) return minus_half();
    if (k == 0.5) return half();
    if (k == 1.0) return one();
    if (k == 1.5) return three_halves();
    throw UnsupportedOrder("Fermi-Dirac order " + std::to_string(k) +
                           " is not supported (use -1/2, 1/2, 1 or 3/2)");
}

Order Order::lowered() const {
    if (twice_ == 1) return minus_half();
    if (twice_ == 3) return half();
    if (twice_ == 2) throw UnsupportedOrder("I_0 is not provided");
    throw UnsupportedOrder("derivative order below -1/2 is not provided");
}

Order Order::raised() const {
    if (twice_ == -1) return half();
    if (twice_ == 1) return three_halves();
    throw UnsupportedOrder("antiderivative order above 3/2 is not provided");
}

SommerfeldTable SommerfeldTable::exact() {
    return SommerfeldTable{{pi * pi / 12.0, 7.0 * std::pow(pi, 4) / 720.0,
                            31.0 * std::pow(pi, 6) / 30240.0}};
}

double gamma_k_plus_one(Order k) {
    switch (k.twice()) {
        case -1: return std::sqrt(pi);
        case 1: return 0.5 * std::sqrt(pi);
        case 2: return 1.0;
        case 3: return 0.75 * std::sqrt(pi);
        default: throw UnsupportedOrder("unsupported Fermi-Dirac order");
    }
}

double integral(Order k, double x, const SommerfeldTable& table) {
    if (!std::isfinite(x)) throw DomainError("Fermi-Dirac argument must be finite");
    if (x <= kSeriesEdge) return series_branch(k, x);
    if (x < kSommerfeldEdge) return quadrature_branch(k, x);
    if (x < kPureAsymptoticEdge) return sommerfeld_with_remainder(k, x, table);
    return pure_sommerfeld(k, x, table);
}

double integral(Order k, double x) {
    static const SommerfeldTable table = SommerfeldTable::exact();
    return integral(k, x, table);
}

double integral_prime(Order k, double x) {
    if (k.twice() != 1 && k.twice() != 3) {
        throw UnsupportedOrder("integral_prime requires k = 1/2 or 3/2");
    }
    return k.value() * integral(k.lowered(), x);
}

std::vector<double> integral_derivatives(Order k, double x, int max_order) {
    if (!std::isfinite(x)) throw DomainError("Fermi-Dirac argument must be finite");
    if (k.twice() != -1 && k.twice() != 1) {
        throw UnsupportedOrder("derivatives are provided for k = -1/2 and 1/2 only");
    }
    if (max_order < 1 || max_order > kMaxDerivative) {
        throw DomainError("derivative order out of range");
    }
    const auto& polys = derivative_polys();
    const double kv = k.value();
    std::vector<double> out(static_cast<std::size_t>(max_order), 0.0);

    // t = x - y; accumulate w * y^k * sigma^{(n)}(t) for all n at once.
    auto accumulate = [&](double y, double jac_w) {
        const double t = x - y;
        const double e = std::exp(-std::abs(t));
        const double s = (t >= 0.0) ? 1.0 / (1.0 + e) : e / (1.0 + e);
        const double q = e / ((1.0 + e) * (1.0 + e));
        const double base = jac_w * q;
        for (int n = 1; n <= max_order; ++n) {
            const auto& c = polys.c[n];
            double poly = 0.0;
            for (int i = n - 1; i >= 0; --i) poly = poly * s + c[i];
            out[n - 1] += base * poly;
        }
    };

    if (x >= kPureAsymptoticEdge) {
        // Differentiate the asymptotic series term by term; the quadrature
        // below loses absolute accuracy to cancellation at high order.
        const SommerfeldTable table = SommerfeldTable::exact();
        for (int n = 1; n <= max_order; ++n) {
            double sum = falling(kv, n - 1) * std::pow(x, kv + 1.0 - n);
            double prev = HUGE_VAL;
            for (int m = 1; m <= kMaxSeriesTerms; ++m) {
                const double eta = (m <= 3) ? table.eta_even[m - 1] : eta_even(m);
                const double a = kv + 1.0 - 2 * m;
                const double term = 2.0 * falling(kv, 2 * m - 1) * eta * falling(a, n) * std::pow(x, a - n);
                if (std::abs(term) > std::abs(prev)) break;
                sum += term;
                if (std::abs(term) < 1e-18 * std::abs(sum)) break;
                prev = term;
            }
            out[n - 1] = sum;
        }
        return out;
    }

    constexpr double kWidth = 42.0;
    const double hi = x + kWidth;
    if (hi <= 0.0) {
        // Nondegenerate: every derivative equals Gamma(k+1) e^x to e^{-42}.
        const double v = series_branch(k, x);
        for (auto& d : out) d = v;
        return out;
    }
    double lo = std::max(0.0, x - kWidth);
    if (lo < 1.0) {
        // y = u^2 on [0, 1] absorbs the y^{-1/2} endpoint behaviour.
        const double up = std::min(1.0, hi);
        detail::composite_gauss(0.0, std::sqrt(up), 4, [&](double u, double w) {
            const double y = u * u;
            accumulate(y, w * 2.0 * std::pow(u, 2.0 * kv + 1.0));
        });
        lo = up;
    }
    if (hi > lo) {
        const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / 2.0));
        detail::composite_gauss(lo, hi, panels, [&](double y, double w) {
            accumulate(y, w * std::pow(y, kv));
        });
    }
    return out;
}

}  // namespace mtf::fermi
