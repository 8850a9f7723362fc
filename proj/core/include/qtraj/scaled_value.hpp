#pragma once

#include <cmath>
#include <limits>

namespace qtraj {

/// A real number stored as sign * exp(log_magnitude).
///
/// Used wherever basis functions such as Bi(z) or exp(kappa x / hbar) leave the
/// double range. Products are exact in log space; sums go through a signed
/// log-sum-exp. sign == 0 marks an exact zero and log_magnitude is then -inf.
struct ScaledValue {
    double log_magnitude = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static ScaledValue zero() { return {}; }
    static ScaledValue from_double(double v);
    static ScaledValue from_log(double log_magnitude, int sign = 1);

    bool is_zero() const { return sign == 0; }

    // May overflow to +-inf or underflow to 0; use log_magnitude for the
    // unbounded representation.
    double to_double() const;

    ScaledValue operator-() const { return {log_magnitude, -sign}; }
    ScaledValue& operator*=(const ScaledValue& rhs);
    ScaledValue& operator/=(const ScaledValue& rhs);
    ScaledValue& operator+=(const ScaledValue& rhs);
    ScaledValue& operator-=(const ScaledValue& rhs) { return *this += -rhs; }
};

ScaledValue operator*(ScaledValue lhs, const ScaledValue& rhs);
ScaledValue operator/(ScaledValue lhs, const ScaledValue& rhs);
ScaledValue operator+(ScaledValue lhs, const ScaledValue& rhs);
ScaledValue operator-(ScaledValue lhs, const ScaledValue& rhs);
ScaledValue operator*(ScaledValue lhs, double rhs);
ScaledValue operator*(double lhs, ScaledValue rhs);

// lhs / rhs as a plain double. Throws RangeError when rhs is zero.
double ratio(const ScaledValue& lhs, const ScaledValue& rhs);

}  // namespace qtraj
