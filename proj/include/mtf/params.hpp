#pragma once

// Problem data shared by the field, functional and scaling layers.

#include <array>
#include <vector>

namespace mtf {

/// Radial confinement W(r) = strength * r^power.
struct Confinement {
    double strength = 1.0;
    double power = 2.0;

    double operator()(double r) const;
};

struct Nucleus {
    double charge = 1.0;  ///< fraction z_k in (0, 1]
    std::array<double, 3> position{0.0, 0.0, 0.0};
};

struct PhysicalParams {
    double Z = 1.0;
    double B = 0.0;
    double T = 1.0;
    double mu = 0.0;
    std::vector<Nucleus> nuclei{Nucleus{}};
    Confinement W;
};

/// Field parameter beta = B / Z^{4/3}, or the lowest-Landau-level limit.
class Beta {
public:
    static Beta finite(double value);
    static Beta infinite() { return Beta(0.0, true); }

    bool is_infinite() const { return infinite_; }
    /// Throws for the infinite branch.
    double value() const;
    /// (1 + beta)^{-3/5}; 0 at infinity (where the functional switches form).
    double pressure_prefactor() const;
    /// Scaled field B~ = beta (1 + beta)^{-2/5}.  Throws for the infinite branch.
    double scaled_field() const;

private:
    Beta(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_;
    bool infinite_;
};

}  // namespace mtf
