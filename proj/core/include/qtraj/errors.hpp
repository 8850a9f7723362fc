#pragma once

#include <stdexcept>
#include <string>

namespace qtraj {

// Argument outside the admissible domain of an operation (non-finite input,
// x outside a potential's region, forbidden-region request for a cycle, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A result is not representable in double precision. Callers should switch to
// the log-scaled entry points.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

// Coefficient triple (a, b, c) does not define a positive-definite form.
class NonPositiveDefinite : public DomainError {
public:
    using DomainError::DomainError;
};

// Initial values admit no positive-definite coefficient triple.
class NoRealSolution : public DomainError {
public:
    using DomainError::DomainError;
};

// A numerical procedure failed to reach its tolerance (non-convergent
// quadrature, integrator convergence gate, non-bracketing search, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qtraj
