// Scans P/(terms) and P'/(terms) over a dimensionless (mu/T, B/T) grid and
// prints the extremes.  P is homogeneous of degree 5/2 in (mu, T, B), so T = 1
// covers every state.  The frozen constants in src/eos.cpp are these extremes
// widened by a factor 2.

#include "mtf/eos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

int main() {
    using namespace mtf::eos;
    std::vector<double> mus;
    for (int i = 0; i <= 80; ++i) mus.push_back(-60.0 + 0.75 * i);
    for (int i = 0; i <= 70; ++i) mus.push_back(std::pow(10.0, -3.0 + 0.1 * i));
    std::vector<double> fields{0.0};
    for (int i = 0; i <= 80; ++i) fields.push_back(std::pow(10.0, -3.0 + 0.1 * i));

    const double inf = std::numeric_limits<double>::infinity();
    double p_lo = inf, p_hi = 0.0, d_lo = inf, d_hi = 0.0;
    for (double B : fields) {
        for (double mu : mus) {
            const GasState s{mu, 1.0, B};
            const auto pt = pressure_bound_terms(s);
            const auto dt = density_bound_terms(s);
            const double p = landau_pressure(s);
            const double d = landau_density(s);
            p_hi = std::max(p_hi, p / (pt.field + pt.bulk + pt.tail));
            d_hi = std::max(d_hi, d / (dt.field + dt.bulk + dt.tail));
            if (mu > 0.0) {
                p_lo = std::min(p_lo, p / (pt.field + pt.bulk));
                d_lo = std::min(d_lo, d / (dt.field + dt.bulk));
            }
        }
    }
    std::printf("pressure: min %.6g  max %.6g\n", p_lo, p_hi);
    std::printf("density:  min %.6g  max %.6g\n", d_lo, d_hi);
    std::printf("frozen:   P [%.6g, %.6g]  P' [%.6g, %.6g]\n", p_lo / 2, 2 * p_hi, d_lo / 2, 2 * d_hi);
}
