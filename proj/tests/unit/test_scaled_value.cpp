#include "doctest.h"

#include <cmath>

#include "qtraj/errors.hpp"
#include "qtraj/scaled_value.hpp"

using qtraj::ScaledValue;

TEST_CASE("round trip through double") {
    for (double v : {1.0, -2.5, 0.0}) {
        CHECK(ScaledValue::from_double(v).to_double() == doctest::Approx(v).epsilon(1e-15));
    }
    // exp(log) amplifies rounding by |log v| near the ends of the range
    for (double v : {1e-300, -7e300}) {
        CHECK(ScaledValue::from_double(v).to_double() == doctest::Approx(v).epsilon(1e-12));
    }
    CHECK(ScaledValue::from_double(0.0).is_zero());
    CHECK_THROWS_AS(ScaledValue::from_double(NAN), qtraj::DomainError);
}

TEST_CASE("products stay exact beyond the double range") {
    const ScaledValue big = ScaledValue::from_log(800.0);
    const ScaledValue tiny = ScaledValue::from_log(-790.0, -1);
    const ScaledValue p = big * tiny;
    CHECK(p.sign == -1);
    CHECK(p.log_magnitude == doctest::Approx(10.0));
    CHECK(qtraj::ratio(big, big * ScaledValue::from_double(2.0)) == doctest::Approx(0.5));
}

TEST_CASE("signed sums") {
    const ScaledValue a = ScaledValue::from_log(1000.0);
    const ScaledValue b = ScaledValue::from_log(1000.0 + std::log(3.0), -1);
    const ScaledValue s = a + b;
    CHECK(s.sign == -1);
    CHECK(s.log_magnitude == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
    CHECK((a - a).is_zero());
    CHECK((a + ScaledValue::zero()).log_magnitude == a.log_magnitude);
    const ScaledValue small = ScaledValue::from_log(-40.0);
    CHECK((a + small).log_magnitude == doctest::Approx(1000.0));
}

TEST_CASE("division by zero is a range error") {
    CHECK_THROWS_AS(qtraj::ratio(ScaledValue::from_double(1.0), ScaledValue::zero()), qtraj::RangeError);
    ScaledValue one = ScaledValue::from_double(1.0);
    CHECK_THROWS_AS(one /= ScaledValue::zero(), qtraj::RangeError);
}
