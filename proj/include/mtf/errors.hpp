#pragma once

#include <stdexcept>
#include <string>

namespace mtf {

/// Argument outside the mathematical domain of an operation (T <= 0, B < 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Fermi-Dirac order that the evaluator does not implement.
class UnsupportedOrder : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data breaks a structural invariant (negative density, non-monotone grid).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Problem set-up that cannot be evaluated (e.g. confinement too weak on the grid).
class SetupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical procedure failed (root bracket not found, non-finite intermediate).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Result not representable in double precision.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Unsupported geometry for the radial code path (more than one nucleus).
class UnsupportedGeometry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace mtf
