#include "mtf/params.hpp"

#include "mtf/errors.hpp"

#include <cmath>

namespace mtf {

double Confinement::operator()(double r) const {
    if (power == 2.0) return strength * r * r;
    return strength * std::pow(r, power);
}

Beta Beta::finite(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw DomainError("beta must be finite and >= 0 (use Beta::infinite for the limit)");
    }
    return Beta(value, false);
}

double Beta::value() const {
    if (infinite_) throw DomainError("beta is infinite");
    return value_;
}

double Beta::pressure_prefactor() const {
    if (infinite_) return 0.0;
    return std::pow(1.0 + value_, -0.6);
}

double Beta::scaled_field() const {
    if (infinite_) throw DomainError("scaled field is unbounded at beta = infinity");
    return value_ * std::pow(1.0 + value_, -0.4);
}

}  // namespace mtf
