#pragma once

// Internal quadrature helpers shared by the numerical modules.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstddef>

namespace mtf::detail {

inline constexpr double kQuadTol = 1e-14;
inline constexpr unsigned kQuadDepth = 18;

/// Adaptive 31-point Gauss-Kronrod on a finite interval.
template <class F>
double adaptive(F&& f, double a, double b, double tol = kQuadTol) {
    if (b <= a) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, kQuadDepth, tol,
                                                                         &err);
}

/// Composite 16-point Gauss-Legendre: calls visit(x, w) for every node.
template <class Visit>
void composite_gauss(double a, double b, std::size_t panels, Visit&& visit) {
    using rule = boost::math::quadrature::gauss<double, 16>;
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h;
        const double half = 0.5 * h;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            visit(mid - half * xs[i], half * ws[i]);
            visit(mid + half * xs[i], half * ws[i]);
        }
    }
}

/// Fermi occupation 1/(e^s + 1) without overflow.
inline double fermi_factor(double s) {
    if (s > 0.0) {
        const double e = std::exp(-s);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(s));
}

}  // namespace mtf::detail
