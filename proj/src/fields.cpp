#include "mtf/fields.hpp"

#include "mtf/errors.hpp"
#include "mtf/scaling.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace mtf::fields {

namespace {

using std::numbers::pi;

// \int_a^{a+h} (a+h-r) r^2 dr / h  and  \int_a^{a+h} (r-a) r^2 dr / h, in a form
// that does not cancel for h << a.
double left_moment(double a, double h) { return h * (a * a / 2.0 + a * h / 3.0 + h * h / 12.0); }
double right_moment(double a, double h) { return h * (a * a / 2.0 + 2.0 * a * h / 3.0 + h * h / 4.0); }

std::vector<double> cell_weights(const std::vector<double>& r, double R) {
    std::vector<double> w(r.size(), 0.0);
    if (r.size() < 2 || R <= 0.0) return w;
    // innermost cell: value at r_1
    const double r1 = std::min(R, r[1]);
    w[1] += 4.0 * pi * r1 * r1 * r1 / 3.0;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        const double a = r[i];
        if (a >= R) break;
        const double h = r[i + 1] - a;
        if (r[i + 1] <= R) {
            w[i] += 4.0 * pi * left_moment(a, h);
            w[i + 1] += 4.0 * pi * right_moment(a, h);
        } else {
            // partial cell [a, R] of the linear interpolant
            const double c = R - a;
            const double m0 = c * (a * a + a * c + c * c / 3.0);                   // \int r^2
            const double m1 = c * c * (a * a / 2.0 + 2.0 * a * c / 3.0 + c * c / 4.0);  // \int (r-a) r^2
            w[i] += 4.0 * pi * (m0 - m1 / h);
            w[i + 1] += 4.0 * pi * m1 / h;
        }
    }
    return w;
}

double interpolate(const RadialGrid& g, const std::vector<double>& v, double tail_charge, double s) {
    const auto& r = g.nodes();
    if (s >= g.r_max()) {
        if (tail_charge != 0.0) return tail_charge / s;
        return v.back();
    }
    const auto it = std::upper_bound(r.begin(), r.end(), s);
    const auto j = static_cast<std::size_t>(it - r.begin());
    if (j <= 1) return v[1];  // innermost cell carries the value at r_1
    if (j < 3 || j + 1 >= r.size()) {
        const double t = (s - r[j - 1]) / (r[j] - r[j - 1]);
        return (1.0 - t) * v[j - 1] + t * v[j];
    }
    // cubic through r_{j-2} .. r_{j+1}
    double out = 0.0;
    for (std::size_t a = j - 2; a <= j + 1; ++a) {
        double l = 1.0;
        for (std::size_t b = j - 2; b <= j + 1; ++b) {
            if (b != a) l *= (s - r[b]) / (r[a] - r[b]);
        }
        out += l * v[a];
    }
    return out;
}

// G(tau) = \int_0^tau t exp(-1/(1-t^2)) dt, tabulated with Hermite interpolation.
class BumpMoment {
public:
    BumpMoment() {
        using rule = boost::math::quadrature::gauss<double, 10>;
        table_[0] = 0.0;
        const double h = 1.0 / kCells;
        for (int c = 0; c < kCells; ++c) {
            const double a = c * h;
            double s = 0.0;
            for (std::size_t q = 0; q < rule::abscissa().size(); ++q) {
                const double x = rule::abscissa()[q];
                const double w = rule::weights()[q];
                s += w * (g(a + h / 2 * (1 + x)) + (x != 0.0 ? g(a + h / 2 * (1 - x)) : 0.0));
            }
            table_[c + 1] = table_[c] + s * h / 2;
        }
    }

    double operator()(double tau) const {
        if (tau <= 0.0) return 0.0;
        if (tau >= 1.0) return table_[kCells];
        const double h = 1.0 / kCells;
        const int c = std::min(static_cast<int>(tau / h), kCells - 1);
        const double a = c * h;
        const double t = (tau - a) / h;
        const double y0 = table_[c], y1 = table_[c + 1];
        const double d0 = g(a) * h, d1 = g(a + h) * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 +
               (t3 - t2) * d1;
    }

    static double g(double t) { return t < 1.0 ? t * std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

private:
    static constexpr int kCells = 4096;
    std::array<double, kCells + 1> table_{};
};

const BumpMoment& bump_moment() {
    static const BumpMoment m;
    return m;
}

}  // namespace

RadialGrid::RadialGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw InvariantViolation("a radial grid needs at least two nodes");
    if (nodes_.front() != 0.0) throw InvariantViolation("radial grid must start at r = 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i])) {
            throw InvariantViolation("radial grid nodes must increase strictly");
        }
    }
    weights_ = cell_weights(nodes_, nodes_.back());
}

RadialGrid RadialGrid::logarithmic(double r_min, double r_max, std::size_t n) {
    if (!(r_min > 0.0) || !(r_max > r_min)) throw DomainError("need 0 < r_min < r_max");
    if (n < 3) throw DomainError("logarithmic grid needs n >= 3");
    std::vector<double> r(n);
    r[0] = 0.0;
    const double step = std::log(r_max / r_min) / static_cast<double>(n - 2);
    for (std::size_t i = 1; i < n; ++i) r[i] = r_min * std::exp(step * static_cast<double>(i - 1));
    r[n - 1] = r_max;
    return RadialGrid(std::move(r));
}

RadialGrid RadialGrid::uniform(double r_max, std::size_t n) {
    if (!(r_max > 0.0)) throw DomainError("need r_max > 0");
    if (n < 2) throw DomainError("uniform grid needs n >= 2");
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = r_max * static_cast<double>(i) / static_cast<double>(n - 1);
    return RadialGrid(std::move(r));
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes) { return RadialGrid(std::move(nodes)); }

std::vector<double> RadialGrid::weights_within(double R) const {
    if (R >= r_max()) return weights_;
    return cell_weights(nodes_, R);
}

RadialGrid RadialGrid::scaled(double factor) const {
    if (!(factor > 0.0)) throw DomainError("grid scale factor must be > 0");
    std::vector<double> r(nodes_);
    for (auto& x : r) x *= factor;
    return RadialGrid(std::move(r));
}

GridPtr make_grid(RadialGrid g) { return std::make_shared<const RadialGrid>(std::move(g)); }

DensityField::DensityField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw InvariantViolation("density without grid");
    if (values.size() != grid->size()) throw InvariantViolation("density size does not match grid");
}

DensityField DensityField::zero(GridPtr g) {
    const auto n = g->size();
    return DensityField(std::move(g), std::vector<double>(n, 0.0));
}

void DensityField::validate() const {
    for (double x : values) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw InvariantViolation("density must be finite and >= 0");
        }
    }
}

double DensityField::total() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += grid->w(i) * values[i];
    return s;
}

PotentialField coulomb_potential(const DensityField& rho) {
    rho.validate();
    const auto& g = *rho.grid;
    const std::size_t n = g.size();
    std::vector<double> v(n, 0.0);
    // v_i = sum_j w_j rho_j / max(r_i, r_j)
    std::vector<double> outer(n, 0.0);
    for (std::size_t j = n - 1; j > 0; --j) {
        outer[j - 1] = outer[j] + g.w(j) * rho.values[j] / g.r(j);
    }
    double inner = 0.0;
    v[0] = outer[0];
    for (std::size_t i = 1; i < n; ++i) {
        inner += g.w(i) * rho.values[i];
        v[i] = inner / g.r(i) + outer[i];
    }
    return PotentialField{rho.grid, std::move(v), inner};
}

double hartree_energy(const DensityField& rho1, const DensityField& rho2) {
    if (rho1.grid != rho2.grid && rho1.grid->nodes() != rho2.grid->nodes()) {
        throw InvariantViolation("densities live on different grids");
    }
    const auto v = coulomb_potential(rho2);
    double s = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) s += rho1.grid->w(i) * rho1.values[i] * v.values[i];
    return 0.5 * s;
}

double hartree_energy(const DensityField& rho) { return hartree_energy(rho, rho); }

PotentialField scaled_external_potential(double z, const Confinement& W, GridPtr grid) {
    if (!(z >= 0.0) || z > 1.0) throw DomainError("nuclear charge fraction must lie in [0, 1]");
    std::vector<double> v(grid->size());
    v[0] = z > 0.0 ? -std::numeric_limits<double>::infinity() : W(0.0);
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double r = grid->r(i);
        v[i] = -z / r + W(r);
    }
    return PotentialField{std::move(grid), std::move(v), 0.0};
}

PotentialField external_potential(const PhysicalParams& params, GridPtr grid) {
    if (params.nuclei.size() != 1) {
        throw UnsupportedGeometry("the radial path handles exactly one nucleus, got " +
                                  std::to_string(params.nuclei.size()));
    }
    const auto& nuc = params.nuclei.front();
    if (nuc.position != std::array<double, 3>{0.0, 0.0, 0.0}) {
        throw UnsupportedGeometry("the radial path needs the nucleus at the origin");
    }
    if (nuc.charge > 1.0) throw DomainError("nuclear charge fraction must be <= 1");
    if (!(nuc.charge > 0.0)) throw DomainError("nuclear charge fraction must be > 0");
    const auto sp = scaling::scale_params(params);
    const double Z = params.Z;
    std::vector<double> v(grid->size());
    v[0] = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double r = grid->r(i);
        v[i] = -Z * nuc.charge / r + Z / sp.ell * params.W(r / sp.ell);
    }
    return PotentialField{std::move(grid), std::move(v), 0.0};
}

PotentialField mollify(const PotentialField& v, const Mollifier& m) {
    const auto& g = *v.grid;
    const double eps = m.scale;
    if (!(eps > 0.0)) throw DomainError("mollifier scale must be > 0");
    if (eps > g.r_max()) throw DomainError("mollifier scale exceeds the grid extent");

    using rule = boost::math::quadrature::gauss<double, 8>;
    const auto& G = bump_moment();
    const auto& r = g.nodes();
    std::vector<double> out(g.size());

    for (std::size_t i = 0; i < g.size(); ++i) {
        const double ri = r[i];
        const double lo = std::max(0.0, ri - eps);
        const double hi = ri + eps;
        // kernel in s, up to a constant: (s / r) [G((r+s)/eps) - G(|r-s|/eps)],
        // and s^2 j(s/eps) at r = 0
        auto kernel = [&](double s) {
            if (ri == 0.0) return s * BumpMoment::g(s / eps);
            return s / ri * (G((ri + s) / eps) - G(std::abs(ri - s) / eps));
        };
        // panel breaks: grid nodes inside (lo, hi), plus ri
        std::vector<double> breaks{lo};
        auto first = std::upper_bound(r.begin(), r.end(), lo);
        for (auto it = first; it != r.end() && *it < hi; ++it) breaks.push_back(*it);
        if (hi > g.r_max()) {
            // past the grid: split the continuation into a few panels
            for (int k = 1; k < 8; ++k) breaks.push_back(g.r_max() + (hi - g.r_max()) * k / 8.0);
        }
        breaks.push_back(hi);
        double num = 0.0, den = 0.0;
        for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
            const double a = breaks[p], b = breaks[p + 1];
            if (b <= a) continue;
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t q = 0; q < rule::abscissa().size(); ++q) {
                for (double sign : {-1.0, 1.0}) {
                    const double x = rule::abscissa()[q];
                    if (x == 0.0 && sign > 0.0) continue;
                    const double s = mid + sign * half * x;
                    const double k = half * rule::weights()[q] * kernel(s);
                    num += k * interpolate(g, v.values, v.tail_charge, s);
                    den += k;
                }
            }
        }
        out[i] = num / den;
    }
    return PotentialField{v.grid, std::move(out), v.tail_charge};
}

double lp_norm(const RadialGrid& grid, const std::vector<double>& values, double p, Region region,
               double tail_charge) {
    if (!(p >= 1.0)) throw DomainError("L^p norm needs p >= 1");
    if (values.size() != grid.size()) throw InvariantViolation("field size does not match grid");
    const auto w = grid.weights_within(region.radius);
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (w[i] != 0.0) s += w[i] * std::pow(std::abs(values[i]), p);
    }
    if (region.radius > grid.r_max() && tail_charge != 0.0) {
        const double R = grid.r_max();
        if (std::isinf(region.radius)) {
            if (!(p > 3.0)) throw DomainError("a 1/r tail is in L^p only for p > 3");
            s += 4.0 * pi * std::pow(std::abs(tail_charge), p) * std::pow(R, 3.0 - p) / (p - 3.0);
        } else {
            const double Rb = region.radius;
            const double q = std::pow(std::abs(tail_charge), p);
            s += (p == 3.0) ? 4.0 * pi * q * std::log(Rb / R)
                            : 4.0 * pi * q * (std::pow(Rb, 3.0 - p) - std::pow(R, 3.0 - p)) / (3.0 - p);
        }
    }
    return std::pow(s, 1.0 / p);
}

double lp_norm(const DensityField& rho, double p, Region region) {
    return lp_norm(*rho.grid, rho.values, p, region, 0.0);
}

double lp_norm(const PotentialField& v, double p, Region region) {
    return lp_norm(*v.grid, v.values, p, region, v.tail_charge);
}

void write_csv(std::ostream& out, const RadialGrid& grid, const std::vector<double>& values) {
    out << "r,value\n";
    const auto old = out.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) out << grid.r(i) << ',' << values[i] << '\n';
    out.precision(old);
}

}  // namespace mtf::fields
