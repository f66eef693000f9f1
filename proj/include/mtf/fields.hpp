#pragma once

// Radial fields: grids, densities, potentials and the operations between them.
//
// Node 0 sits at r = 0 and carries zero quadrature weight; the innermost cell
// [0, r_1] is integrated with the value at r_1.  On every other cell the
// weights integrate the piecewise-linear interpolant against 4 pi r^2 exactly.

#include "mtf/params.hpp"

#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

namespace mtf::fields {

class RadialGrid {
public:
    /// r_0 = 0 followed by n - 1 logarithmically spaced nodes in [r_min, r_max].
    static RadialGrid logarithmic(double r_min, double r_max, std::size_t n);
    /// n equally spaced nodes on [0, r_max].
    static RadialGrid uniform(double r_max, std::size_t n);
    /// Arbitrary nodes; must start at 0 and increase strictly.
    static RadialGrid from_nodes(std::vector<double> nodes);

    std::size_t size() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    double r(std::size_t i) const { return nodes_[i]; }
    double w(std::size_t i) const { return weights_[i]; }
    double r_max() const { return nodes_.back(); }

    /// Weights for the integral over the ball |x| <= R (R clipped to r_max).
    std::vector<double> weights_within(double R) const;
    /// The same grid with every radius multiplied by factor.
    RadialGrid scaled(double factor) const;

private:
    explicit RadialGrid(std::vector<double> nodes);
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(RadialGrid g);

struct DensityField {
    GridPtr grid;
    std::vector<double> values;

    DensityField() = default;
    DensityField(GridPtr g, std::vector<double> v);
    static DensityField zero(GridPtr g);

    /// Throws InvariantViolation on negative or non-finite values.
    void validate() const;
    double total() const;
};

struct PotentialField {
    GridPtr grid;
    std::vector<double> values;
    /// Beyond r_max the field continues as tail_charge / r.
    double tail_charge = 0.0;
};

/// v = rho * |x|^{-1}.
PotentialField coulomb_potential(const DensityField& rho);

/// D(rho, rho) = (1/2) \int rho v_rho.
double hartree_energy(const DensityField& rho);
/// Symmetric bilinear form D(rho1, rho2).
double hartree_energy(const DensityField& rho1, const DensityField& rho2);

/// Unscaled V_{Z,B}(r) = -Z z_1 / r + Z l^{-1} W(l^{-1} r).  Single nucleus at the
/// origin only.  Node 0 holds -infinity when the nuclear charge is positive.
PotentialField external_potential(const PhysicalParams& params, GridPtr grid);

/// Scaled -z / r + W(r).
PotentialField scaled_external_potential(double z, const Confinement& W, GridPtr grid);

/// j(x) proportional to exp(-1/(1 - |x|^2)) on the unit ball, rescaled to radius `scale`.
struct Mollifier {
    double scale = 0.1;
};

/// v * j_r, normalized per node so constants are preserved exactly.  Beyond
/// r_max, v is continued by its tail charge (or by its last value).
PotentialField mollify(const PotentialField& v, const Mollifier& m);

/// Region of integration: a ball of finite radius or all of space.
struct Region {
    double radius = std::numeric_limits<double>::infinity();

    static Region ball(double R) { return Region{R}; }
    static Region all_space() { return Region{}; }
};

/// (\int_region |f|^p 4 pi r^2 dr)^{1/p}.  On all of space the tail
/// |Q/r|^p beyond r_max is added analytically (needs p > 3 when Q != 0).
double lp_norm(const RadialGrid& grid, const std::vector<double>& values, double p, Region region,
               double tail_charge = 0.0);
double lp_norm(const DensityField& rho, double p, Region region = Region::all_space());
double lp_norm(const PotentialField& v, double p, Region region = Region::all_space());

/// CSV with header "r,value".
void write_csv(std::ostream& out, const RadialGrid& grid, const std::vector<double>& values);

}  // namespace mtf::fields
