#pragma once

// Complete Fermi-Dirac integrals
//
//     I_k(x) = \int_0^\infty y^k / (e^{y-x} + 1) dy
//
// for the half-integer orders that appear in the magnetized free-gas
// equation of state (plus k = 1, which has a closed form at x = 0 and is
// kept as an accuracy anchor).
//
// Evaluation is piecewise:
//   x <= -5      alternating exponential series,
//   |x| < 5      composite Gauss quadrature after y = t^2,
//   5 <= x < 30  three-term Sommerfeld expansion + quadrature of the remainder,
//   x >= 30      optimally truncated Sommerfeld series.
// All branches agree to ~1e-13 relative.

#include <array>
#include <vector>

namespace mtf::fermi {

/// Order k of I_k, restricted to {-1/2, 1/2, 1, 3/2}.
class Order {
public:
    static constexpr Order minus_half() { return Order{-1}; }
    static constexpr Order half() { return Order{1}; }
    static constexpr Order one() { return Order{2}; }
    static constexpr Order three_halves() { return Order{3}; }

    /// Throws UnsupportedOrder for anything but the four supported values.
    static Order from_value(double k);

    constexpr double value() const { return 0.5 * twice_; }
    constexpr int twice() const { return twice_; }

    /// Order k - 1 (derivative order); only valid for k >= 1/2.
    Order lowered() const;
    /// Order k + 1 (antiderivative order); only valid for k <= 1/2.
    Order raised() const;

    friend constexpr bool operator==(Order, Order) = default;

private:
    constexpr explicit Order(int twice) : twice_(twice) {}
    int twice_;
};

/// Dirichlet eta values eta(2), eta(4), eta(6) that weight the Sommerfeld
/// terms.  Exposed so the self-test battery can inject a corrupted table.
struct SommerfeldTable {
    std::array<double, 3> eta_even;

    static SommerfeldTable exact();
};

double integral(Order k, double x);
double integral(Order k, double x, const SommerfeldTable& table);

/// d/dx I_k(x) = k I_{k-1}(x); k must be 1/2 or 3/2.
double integral_prime(Order k, double x);

/// Derivatives d^n/dx^n I_k(x) for n = 1..max_order, computed by quadrature of
/// y^k times the n-th derivative of the Fermi factor.  k in {-1/2, 1/2}.
std::vector<double> integral_derivatives(Order k, double x, int max_order);

/// Gamma(k + 1) for the supported orders.
double gamma_k_plus_one(Order k);

}  // namespace mtf::fermi
