#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "qtraj/errors.hpp"
#include "qtraj/specfun.hpp"
#include "reference_values.hpp"

namespace sf = qtraj::specfun;
using namespace qtraj::testref;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double log_wronskian_error(const sf::AiryScaled& s) {
    // Ai Bi' - Ai' Bi in log space
    const qtraj::ScaledValue w = s.ai * s.bi_prime - s.ai_prime * s.bi;
    return std::abs(w.to_double() * std::numbers::pi - 1.0);
}

}  // namespace

TEST_CASE("values at the origin match the Maclaurin constants") {
    const auto ai = sf::airy_ai(0.0);
    const auto bi = sf::airy_bi(0.0);
    CHECK(rel(ai.value, kAi0) < 1e-12);
    CHECK(rel(ai.derivative, kAiPrime0) < 1e-12);
    CHECK(rel(bi.value, kBi0) < 1e-12);
    CHECK(rel(bi.derivative, kBiPrime0) < 1e-12);
    CHECK(std::abs(ai.value * bi.derivative - ai.derivative * bi.value - sf::kOneOverPi) < 1e-15);
}

TEST_CASE("tabulated values to 1e-12 relative") {
    for (const AiryRow& row : kAiryTable) {
        CAPTURE(row.z);
        const auto ai = sf::airy_ai(row.z);
        const auto bi = sf::airy_bi(row.z);
        CHECK(rel(ai.value, row.ai) < 1e-12);
        CHECK(rel(ai.derivative, row.ai_prime) < 1e-12);
        CHECK(rel(bi.value, row.bi) < 1e-12);
        CHECK(rel(bi.derivative, row.bi_prime) < 1e-12);
    }
}

TEST_CASE("Ai decays without overflow, Bi signals range") {
    const auto ai = sf::airy_ai(50.0);
    CHECK(std::isfinite(ai.value));
    CHECK(std::isfinite(ai.derivative));
    CHECK(std::abs(ai.value) < 1e-100);
    CHECK(sf::airy_ai(1e6).value == 0.0);
    CHECK_THROWS_AS(sf::airy_bi(200.0), qtraj::RangeError);
    CHECK_NOTHROW(sf::airy_scaled(200.0));
}

TEST_CASE("non-finite input is a domain error") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(sf::airy_ai(nan), qtraj::DomainError);
    CHECK_THROWS_AS(sf::airy_bi(inf), qtraj::DomainError);
    CHECK_THROWS_AS(sf::airy_scaled(-inf), qtraj::DomainError);
    CHECK_THROWS_AS(sf::airy_phase(nan), qtraj::DomainError);
}

TEST_CASE("Wronskian is 1/pi on [-20, 8]") {
    double worst = 0.0;
    for (int i = 0; i <= 2800; ++i) {
        const double z = -20.0 + 0.01 * i;
        const auto ai = sf::airy_ai(z);
        const auto bi = sf::airy_bi(z);
        const double w = ai.value * bi.derivative - ai.derivative * bi.value;
        worst = std::max(worst, std::abs(w * std::numbers::pi - 1.0));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("scaled Wronskian holds far outside the unscaled range") {
    for (double z : {-1e4, -500.0, -30.0, 30.0, 100.0, 700.0, 1e4}) {
        CAPTURE(z);
        CHECK(log_wronskian_error(sf::airy_scaled(z)) < 1e-8);
    }
    // at z = 1e6 the exponents are ~7e8, whose last bit is ~1e-7
    const double zeta = 2.0 / 3.0 * 1e9;
    CHECK(log_wronskian_error(sf::airy_scaled(1e6)) < 4.0 * zeta * std::numeric_limits<double>::epsilon());
}

TEST_CASE("log magnitudes at z = 100") {
    const auto s = sf::airy_scaled(100.0);
    const double zeta = 2.0 / 3.0 * 1000.0;
    CHECK(std::abs(s.ai.log_magnitude - kLogAi100) < 1e-12 * zeta);
    CHECK(std::abs(s.bi.log_magnitude - kLogBi100) < 1e-12 * zeta);
    CHECK(std::abs(s.ai_prime.log_magnitude - kLogAiPrime100) < 1e-12 * zeta);
    CHECK(std::abs(s.bi_prime.log_magnitude - kLogBiPrime100) < 1e-12 * zeta);
    CHECK(s.ai_prime.sign == -1);
    // leading behaviour: log Ai ~ -zeta, log Bi ~ +zeta
    CHECK(std::abs(s.ai.log_magnitude + zeta) < 10.0);
    CHECK(std::abs(s.bi.log_magnitude - zeta) < 10.0);
}

TEST_CASE("oscillatory magnitudes stay under the leading envelope") {
    const double z = -10.0;
    const auto s = sf::airy_scaled(z);
    const double envelope = std::pow(std::abs(z), -0.25) / std::sqrt(std::numbers::pi);
    CHECK(std::abs(s.ai.to_double()) <= envelope * 1.001);
    CHECK(std::abs(s.bi.to_double()) <= envelope * 1.001);
    const double m2 = s.ai.to_double() * s.ai.to_double() + s.bi.to_double() * s.bi.to_double();
    CHECK(std::abs(m2 / (envelope * envelope) - 1.0) < 1e-3);
}

TEST_CASE("scaled and unscaled agree where both are representable") {
    double worst = 0.0;
    for (int i = 0; i <= 800; ++i) {
        const double z = -30.0 + 0.125 * i;
        const auto s = sf::airy_scaled(z);
        const auto ai = sf::airy_ai(z);
        const auto bi = sf::airy_bi(z);
        worst = std::max({worst, rel(s.ai.to_double(), ai.value), rel(s.ai_prime.to_double(), ai.derivative),
                          rel(s.bi.to_double(), bi.value), rel(s.bi_prime.to_double(), bi.derivative)});
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("series and asymptotic routes agree at the switch point") {
    for (double z : {-sf::kAirySwitch, sf::kAirySwitch}) {
        CAPTURE(z);
        const auto t = sf::airy_taylor(z);
        const auto a = sf::airy_asymptotic(z);
        // compare against the local modulus so oscillation zeros do not inflate the error
        const double m = std::hypot(t.ai.to_double(), t.bi.to_double());
        const double mp = std::hypot(t.ai_prime.to_double(), t.bi_prime.to_double());
        if (z < 0.0) {
            CHECK(std::abs(t.ai.to_double() - a.ai.to_double()) < 1e-11 * m);
            CHECK(std::abs(t.bi.to_double() - a.bi.to_double()) < 1e-11 * m);
            CHECK(std::abs(t.ai_prime.to_double() - a.ai_prime.to_double()) < 1e-11 * mp);
            CHECK(std::abs(t.bi_prime.to_double() - a.bi_prime.to_double()) < 1e-11 * mp);
        } else {
            CHECK(std::abs(t.ai.log_magnitude - a.ai.log_magnitude) < 1e-11);
            CHECK(std::abs(t.bi.log_magnitude - a.bi.log_magnitude) < 1e-11);
            CHECK(std::abs(t.ai_prime.log_magnitude - a.ai_prime.log_magnitude) < 1e-11);
            CHECK(std::abs(t.bi_prime.log_magnitude - a.bi_prime.log_magnitude) < 1e-11);
        }
    }
}

TEST_CASE("ODE residual by second differences") {
    const double h = 2e-4;
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double z = -20.0 + 0.1 * i;
        for (auto fn : {&sf::airy_ai, &sf::airy_bi}) {
            const double y0 = fn(z - h).value;
            const double y1 = fn(z).value;
            const double y2 = fn(z + h).value;
            const double second = (y2 - 2.0 * y1 + y0) / (h * h);
            const auto ai = sf::airy_ai(z);
            const auto bi = sf::airy_bi(z);
            const double scale = (1.0 + std::abs(z)) * std::max(std::hypot(ai.value, bi.value), std::abs(y1));
            worst = std::max(worst, std::abs(second - z * y1) / scale);
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("phase is continuous, increasing and consistent with atan2") {
    double prev = sf::airy_phase(-30.0);
    for (int i = 1; i <= 4000; ++i) {
        const double z = -30.0 + 0.01 * i;
        const double chi = sf::airy_phase(z);
        // saturates at pi/2 to double precision once Ai/Bi underflows relative to 1
        if (z < 5.0) CHECK(chi > prev);
        CHECK(chi >= prev);
        CHECK(chi - prev < 0.1);
        const auto ai = sf::airy_ai(z);
        const auto bi = sf::airy_bi(z);
        const double wrapped = std::remainder(chi - std::atan2(bi.value, ai.value), 2.0 * std::numbers::pi);
        CHECK(std::abs(wrapped) < 1e-10);
        prev = chi;
    }
    CHECK(sf::airy_phase(0.0) == doctest::Approx(std::numbers::pi / 3.0).epsilon(1e-14));
    CHECK(sf::airy_phase(50.0) == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-14));
}
