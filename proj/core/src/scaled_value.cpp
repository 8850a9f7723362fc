#include "qtraj/scaled_value.hpp"

#include <algorithm>

#include "qtraj/errors.hpp"

namespace qtraj {

ScaledValue ScaledValue::from_double(double v) {
    if (v == 0.0) return zero();
    if (!std::isfinite(v)) throw DomainError("ScaledValue: non-finite value");
    return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
}

ScaledValue ScaledValue::from_log(double log_magnitude, int sign) {
    if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) return zero();
    return {log_magnitude, sign > 0 ? 1 : -1};
}

double ScaledValue::to_double() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_magnitude);
}

ScaledValue& ScaledValue::operator*=(const ScaledValue& rhs) {
    if (sign == 0 || rhs.sign == 0) {
        *this = zero();
        return *this;
    }
    log_magnitude += rhs.log_magnitude;
    sign *= rhs.sign;
    return *this;
}

ScaledValue& ScaledValue::operator/=(const ScaledValue& rhs) {
    if (rhs.sign == 0) throw RangeError("ScaledValue: division by zero");
    if (sign == 0) return *this;
    log_magnitude -= rhs.log_magnitude;
    sign *= rhs.sign;
    return *this;
}

ScaledValue& ScaledValue::operator+=(const ScaledValue& rhs) {
    if (rhs.sign == 0) return *this;
    if (sign == 0) {
        *this = rhs;
        return *this;
    }
    const bool this_larger = log_magnitude >= rhs.log_magnitude;
    const double hi = this_larger ? log_magnitude : rhs.log_magnitude;
    const double lo = this_larger ? rhs.log_magnitude : log_magnitude;
    const int hi_sign = this_larger ? sign : rhs.sign;
    const double t = std::exp(lo - hi);
    if (sign == rhs.sign) {
        log_magnitude = hi + std::log1p(t);
        sign = hi_sign;
        return *this;
    }
    if (t == 1.0) {
        *this = zero();
        return *this;
    }
    log_magnitude = hi + std::log1p(-t);
    sign = hi_sign;
    return *this;
}

ScaledValue operator*(ScaledValue lhs, const ScaledValue& rhs) { return lhs *= rhs; }
ScaledValue operator/(ScaledValue lhs, const ScaledValue& rhs) { return lhs /= rhs; }
ScaledValue operator+(ScaledValue lhs, const ScaledValue& rhs) { return lhs += rhs; }
ScaledValue operator-(ScaledValue lhs, const ScaledValue& rhs) { return lhs -= rhs; }
ScaledValue operator*(ScaledValue lhs, double rhs) { return lhs *= ScaledValue::from_double(rhs); }
ScaledValue operator*(double lhs, ScaledValue rhs) { return rhs *= ScaledValue::from_double(lhs); }

double ratio(const ScaledValue& lhs, const ScaledValue& rhs) { return (lhs / rhs).to_double(); }

}  // namespace qtraj
