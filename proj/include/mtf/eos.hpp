#pragma once

// Free electron gas in a homogeneous magnetic field at temperature T >= 0.
//
// Units follow hbar = 2m = e = 1: Landau levels 2 B nu + p^2 with degeneracy
// B/(2 pi) for nu = 0 and B/pi for nu >= 1 per unit transverse area.  The
// pressure is
//
//     P_{T,B}(mu) = (B T^{3/2} / pi) [ I_{1/2}(mu/T) + 2 sum_{nu>=1} I_{1/2}((mu - 2 B nu)/T) ]
//
// and its mu-derivative (the density) carries I_{-1/2} with prefactor
// B T^{1/2} / (2 pi).

namespace mtf::eos {

struct GasState {
    double mu = 0.0;  ///< chemical potential
    double T = 1.0;   ///< temperature, > 0 for the finite-T routines
    double B = 0.0;   ///< field strength, >= 0
};

/// Landau degeneracy per unit transverse area.
double degeneracy(int nu, double B);

/// P_{T,B}(mu); T > 0, B >= 0.  B = 0 gives the field-free gas.
double landau_pressure(const GasState& s);

/// P'_{T,B}(mu) = d P / d mu.
double landau_density(const GasState& s);

/// Integrated density of states G(eps) = sum_nu 2 d_nu(B) |eps - 2 B nu|_+^{1/2}.
double integrated_dos(double eps, double B);

/// P_{T,B}(mu) by quadrature of G against the Fermi factor (independent of the
/// Landau-sum evaluation; used to cross-check it).
double dos_pressure(const GasState& s);

/// Lowest-Landau-level pressure P^inf_T(mu) = T^{3/2} I_{1/2}(mu/T) / pi.
double lll_pressure(double mu, double T);
double lll_density(double mu, double T);

/// T = 0 pressure sum_nu d_nu(B) (4/3) |mu - 2 B nu|_+^{3/2}.
double zero_t_pressure(double mu, double B);

/// Constants of the two-sided estimates, calibrated on a reference grid
/// (see tools/calibrate_bounds.cpp) and widened by a factor 2.
struct BoundConstants {
    double lower;
    double upper;
};

BoundConstants pressure_bound_constants();
BoundConstants density_bound_constants();

struct BoundTerms {
    double field = 0.0;  ///< B |mu|_+^{3/2}   (B |mu|_+^{1/2} for the density)
    double bulk = 0.0;   ///< |mu|_+^{5/2}     (|mu|_+^{3/2})
    double tail = 0.0;   ///< e^{-|mu|/T} (B T^{3/2} + T^{5/2})   (... T^{1/2}, T^{3/2})
};

struct BoundsReport {
    double lower = 0.0;
    double value = 0.0;
    double upper = 0.0;
    BoundTerms terms;

    bool contained() const { return lower <= value && value <= upper; }
};

BoundsReport pressure_bounds(const GasState& s);
BoundsReport density_bounds(const GasState& s);

/// Raw term sums of the estimates, without constants (for calibration).
BoundTerms pressure_bound_terms(const GasState& s);
BoundTerms density_bound_terms(const GasState& s);

}  // namespace mtf::eos
