#pragma once

#include <optional>

#include "qtraj/setup.hpp"

namespace qtraj {

/// Coefficients (a, b, c) selecting one solution
///   W_x = hbar (ab - c^2/4)^{1/2} w / (a phi^2 + b theta^2 + c phi theta)
/// of the quantum stationary Hamilton-Jacobi equation, where w is the
/// Wronskian of the unnormalized basis pair. W_x is invariant under a joint
/// rescaling of (a, b, c); the "unit gauge" fixes ab - c^2/4 = 1.
struct Microstate {
    double a = 1.0;
    double b = 1.0;
    double c = 0.0;

    // ab - c^2/4
    double gauge() const { return a * b - 0.25 * c * c; }
};

// Returns ms unchanged, or throws NonPositiveDefinite naming the violated
// condition (a > 0, b > 0, ab - c^2/4 > 0, all finite).
Microstate validate(const Microstate& ms);

// Rescales to ab - c^2/4 = 1.
Microstate unit_gauge(const Microstate& ms);

struct InitialValues {
    double Wx0 = 0.0;
    double Wxx0 = 0.0;
};

InitialValues initials_from_coefficients(const PhysicalSetup& setup, const Microstate& ms, double x0);

// Inverse of initials_from_coefficients in the unit gauge. Throws DomainError
// for Wx0 <= 0 and NoRealSolution when no positive-definite triple exists.
Microstate coefficients_from_initials(const PhysicalSetup& setup, double x0, double Wx0, double Wxx0);

/// Squared amplitude A = (a-b)^2 + c^2 of the oscillating term in the W_x
/// denominator and its phase cot^{-1}[c/(a-b)] in [0, pi). The phase is empty
/// when a = b and c = 0: the oscillating term vanishes identically.
struct IndeterminacySignature {
    double amplitude_sq = 0.0;
    std::optional<double> phase;
};

IndeterminacySignature indeterminacy_signature(const Microstate& ms);

// Unit-gauge microstate with (a-b)^2 + c^2 = amplitude_sq and
// (a - b, c) = sqrt(amplitude_sq) (cos angle, sin angle).
Microstate microstate_from_amplitude(double amplitude_sq, double angle);

}  // namespace qtraj
