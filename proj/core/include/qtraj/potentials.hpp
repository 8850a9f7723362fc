#pragma once

#include "qtraj/scaled_value.hpp"
#include "qtraj/setup.hpp"

namespace qtraj {

/// Two independent solutions of psi'' = -(2m/hbar^2)(E - V) psi at one x.
///
/// The pairs are unnormalized:
///   Free    phi = cos(k x / hbar),  theta = sin(k x / hbar),  k = (2mE)^{1/2}
///   Step    phi = exp(-kappa x / hbar), theta = exp(+kappa x / hbar),
///           kappa = [2m(U - E)]^{1/2}
///   Linear  phi = Ai(z), theta = Bi(z), z = (2mf)^{1/3}(x - E/f) / hbar^{2/3}
/// Normalization prefactors are folded into the trajectory closed forms
/// through `wronskian`.
struct BasisPair {
    ScaledValue phi;
    ScaledValue theta;
    ScaledValue phi_prime;
    ScaledValue theta_prime;
    double x = 0.0;
    // phi theta' - phi' theta, exact and x-independent.
    double wronskian = 0.0;
    // Unwrapped arg(phi + i theta), continuous and increasing in x.
    double phase = 0.0;
    // (2m/hbar^2)(E - V(x)), so that phi'' = -q phi.
    double q = 0.0;
};

// Throws DomainError outside the admissible region (Step: x < 0) or when the
// setup is invalid.
BasisPair basis(const PhysicalSetup& setup, double x);

// Whether x lies where the potential's basis is defined.
bool admissible(const PhysicalSetup& setup, double x);

/// The quadratic form D = a phi^2 + b theta^2 + c phi theta and its first two
/// x-derivatives at one point, all relative to D so nothing overflows.
/// D'' uses phi'' = -q phi. Free and Step use the trigonometric and
/// exponential closed forms, so symmetric microstates cancel exactly.
struct BasisForm {
    ScaledValue d;
    double d1_over_d = 0.0;
    double d2_over_d = 0.0;
    // log(hbar (ab - c^2/4)^{1/2} * wronskian): W_x = exp(log_numerator) / D.
    double log_numerator = 0.0;
    double phase = 0.0;
    double potential = 0.0;
};

BasisForm basis_form(const PhysicalSetup& setup, double a, double b, double c, double x);

struct SchrodingerResidual {
    double phi = 0.0;
    double theta = 0.0;
};

// Relative residual of y'' + q y = 0 for both basis functions, with y'' from a
// five-point finite difference of basis() and q y analytic. Residuals are
// normalized by q_scale * |(phi, theta)| so zeros of either function are
// harmless. step <= 0 picks 1e-2 / sqrt(q_scale).
SchrodingerResidual schrodinger_residual(const PhysicalSetup& setup, double x, double step = 0.0);

// Helpers shared by the modules that need the natural scales.
double free_wavenumber(const PhysicalSetup& setup);      // (2mE)^{1/2}
double step_decay_constant(const PhysicalSetup& setup);  // [2m(U - E)]^{1/2}
double airy_length(const PhysicalSetup& setup);          // hbar^{2/3} / (2mf)^{1/3}
double airy_argument(const PhysicalSetup& setup, double x);
double turning_point(const PhysicalSetup& setup);         // E / f

}  // namespace qtraj
