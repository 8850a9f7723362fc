#pragma once

#include "qtraj/scaled_value.hpp"

/// Double-precision Airy functions of a real argument.
///
/// Evaluation strategy:
///   * |z| <= kAirySwitch: Taylor expansion of the Airy ODE y'' = z y about the
///     nearest node of a fixed 0.5-spaced anchor table. The anchors are
///     generated once by Taylor continuation in the numerically stable
///     direction: Bi and both oscillatory branches forward from the exact
///     values at z = 0, Ai on z > 0 backward from its asymptotic expansion at
///     z = kAirySwitch + 3.
///   * |z| > kAirySwitch: the standard Poincare asymptotic expansions,
///     truncated at the smallest term. On z > 0 the exponential factor
///     exp(+-2/3 z^{3/2}) is carried in the log magnitude of the scaled form.
namespace qtraj::specfun {

inline constexpr double kAirySwitch = 9.0;
inline constexpr double kOneOverPi = 0.318309886183790671537767526745;

struct AiryValue {
    double value;
    double derivative;
};

struct AiryScaled {
    ScaledValue ai;
    ScaledValue ai_prime;
    ScaledValue bi;
    ScaledValue bi_prime;
};

// Ai(z), Ai'(z). Underflows to 0 for large positive z. Throws DomainError on
// non-finite input.
AiryValue airy_ai(double z);

// Bi(z), Bi'(z). Throws RangeError once Bi or Bi' exceeds the double range;
// use airy_scaled there.
AiryValue airy_bi(double z);

// All four values in overflow-free log-scaled form.
AiryScaled airy_scaled(double z);

// Continuous (unwrapped) argument of Ai(z) + i Bi(z). Strictly increasing in
// z, tends to pi/2 as z -> +inf and behaves like pi/4 - (2/3)|z|^{3/2} as
// z -> -inf. Lets callers count Ai zeros without locating them.
double airy_phase(double z);

// The two evaluation routes, exposed so the switch point can be pinned by
// tests. airy_taylor requires |z| <= kAirySwitch + 3; airy_asymptotic requires
// |z| >= 4.
AiryScaled airy_taylor(double z);
AiryScaled airy_asymptotic(double z);

}  // namespace qtraj::specfun
