#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qtraj/errors.hpp"
#include "qtraj/microstate.hpp"
#include "qtraj/potentials.hpp"
#include "qtraj/trajectory.hpp"

using namespace qtraj;

namespace {

const PhysicalSetup kFree{1.0, 0.5, 1.0, FreePotential{}};

Microstate random_microstate(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> log_ab(-1.0, 1.0);
    std::uniform_real_distribution<double> frac(-0.95, 0.95);
    const double a = std::exp(log_ab(rng));
    const double b = std::exp(log_ab(rng));
    return {a, b, 2.0 * std::sqrt(a * b) * frac(rng)};
}

}  // namespace

TEST_CASE("validation") {
    CHECK_NOTHROW(validate(Microstate{1.0, 1.0, 0.0}));
    CHECK(validate(Microstate{2.0, 1.0, 0.5}).gauge() == 1.9375);
    CHECK_THROWS_AS(validate(Microstate{1.0, 1.0, 2.0}), NonPositiveDefinite);
    CHECK_THROWS_AS(validate(Microstate{-1.0, -1.0, 0.0}), NonPositiveDefinite);
    CHECK_THROWS_AS(validate(Microstate{1.0, 0.0, 0.0}), NonPositiveDefinite);
    CHECK_THROWS_AS(validate(Microstate{1.0, NAN, 0.0}), NonPositiveDefinite);
    try {
        validate(Microstate{1.0, 1.0, 2.0});
    } catch (const NonPositiveDefinite& e) {
        CHECK(std::string(e.what()).find("ab - c^2/4") != std::string::npos);
    }
}

TEST_CASE("initial values of known microstates") {
    for (double x0 : {-2.0, 0.0, 0.3, 11.0}) {
        const InitialValues iv = initials_from_coefficients(kFree, {1.0, 1.0, 0.0}, x0);
        CHECK(iv.Wx0 == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(iv.Wxx0) < 1e-15);
    }
    const InitialValues two = initials_from_coefficients(kFree, {2.0, 1.0, 0.0}, 0.0);
    CHECK(two.Wx0 == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(std::abs(two.Wxx0) < 1e-15);

    for (double hbar : {1.0, 0.1}) {
        const PhysicalSetup step{1.0, 0.5, hbar, StepPotential{1.0}};
        const InitialValues iv = initials_from_coefficients(step, {1.0, 1.0, 0.0}, 0.0);
        CHECK(iv.Wx0 == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("classical initial values recover the symmetric microstate") {
    for (double x0 : {0.0, 1.25, -7.0}) {
        const Microstate ms = coefficients_from_initials(kFree, x0, 1.0, 0.0);
        CHECK(ms.a == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ms.b == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(ms.c) < 1e-12);
    }
}

TEST_CASE("precondition and unrepresentable data") {
    CHECK_THROWS_AS(coefficients_from_initials(kFree, 0.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(coefficients_from_initials(kFree, 0.0, -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(coefficients_from_initials(kFree, 0.0, 1.0, NAN), DomainError);
    CHECK_THROWS_AS(coefficients_from_initials(kFree, 0.0, 1e-310, 0.0), NoRealSolution);
}

TEST_CASE("round trip across potentials") {
    std::mt19937_64 rng(11);
    const PhysicalSetup setups[] = {
        {1.0, 0.5, 0.7, FreePotential{}},
        {1.0, 0.5, 0.5, StepPotential{1.0}},
        {1.0, 0.5, 0.4, LinearPotential{1.0}},
    };
    std::uniform_real_distribution<double> x_free(-5.0, 5.0);
    // keep 2 kappa x / hbar <= 2 so the decaying coefficient stays well conditioned
    std::uniform_real_distribution<double> x_step(0.0, 0.5);
    std::uniform_real_distribution<double> x_lin(-2.0, 0.8);
    for (const PhysicalSetup& s : setups) {
        double worst_initials = 0.0;
        double worst_coeffs = 0.0;
        for (int i = 0; i < 200; ++i) {
            const Microstate ms = unit_gauge(random_microstate(rng));
            double x0 = 0.0;
            if (std::holds_alternative<FreePotential>(s.potential)) x0 = x_free(rng);
            if (std::holds_alternative<StepPotential>(s.potential)) x0 = x_step(rng);
            if (std::holds_alternative<LinearPotential>(s.potential)) x0 = x_lin(rng);
            const InitialValues iv = initials_from_coefficients(s, ms, x0);
            const Microstate back = coefficients_from_initials(s, x0, iv.Wx0, iv.Wxx0);
            CHECK(back.gauge() == doctest::Approx(1.0).epsilon(1e-12));
            const InitialValues again = initials_from_coefficients(s, back, x0);
            const double scale = std::abs(iv.Wx0) + std::abs(iv.Wxx0);
            worst_initials = std::max({worst_initials, std::abs(again.Wx0 / iv.Wx0 - 1.0),
                                       std::abs(again.Wxx0 - iv.Wxx0) / scale});
            worst_coeffs = std::max({worst_coeffs, std::abs(back.a - ms.a) / ms.a, std::abs(back.b - ms.b) / ms.b,
                                     std::abs(back.c - ms.c) / std::sqrt(ms.a * ms.b)});
        }
        CHECK(worst_initials < 1e-10);
        CHECK(worst_coeffs < 1e-10);
    }
}

TEST_CASE("indeterminacy signature") {
    const auto sym = indeterminacy_signature({1.0, 1.0, 0.0});
    CHECK(sym.amplitude_sq == 0.0);
    CHECK_FALSE(sym.phase.has_value());

    const auto two = indeterminacy_signature({2.0, 1.0, 0.0});
    CHECK(two.amplitude_sq == 1.0);
    REQUIRE(two.phase.has_value());
    CHECK(*two.phase == doctest::Approx(std::numbers::pi / 2.0));

    CHECK(indeterminacy_signature({2.0, 1.0, 0.5}).amplitude_sq == doctest::Approx(1.25));

    const auto tilted = indeterminacy_signature({1.0, 1.0, 0.5});
    REQUIRE(tilted.phase.has_value());
    CHECK(*tilted.phase == 0.0);

    // cot^{-1} lands in (0, pi) for either sign of c/(a-b)
    CHECK(*indeterminacy_signature({2.0, 1.0, 1.0}).phase == doctest::Approx(std::numbers::pi / 2.0 - std::atan(1.0)));
    CHECK(*indeterminacy_signature({2.0, 1.0, -1.0}).phase ==
          doctest::Approx(std::numbers::pi / 2.0 + std::atan(1.0)));
}

TEST_CASE("amplitude parametrization") {
    for (double amp : {0.0, 1e-6, 1.25, 40.0}) {
        for (double angle : {0.0, 1.0, 3.0, -2.0}) {
            const Microstate ms = microstate_from_amplitude(amp, angle);
            CHECK(ms.gauge() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(indeterminacy_signature(ms).amplitude_sq == doctest::Approx(amp).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(microstate_from_amplitude(-1.0, 0.0), DomainError);
}

TEST_CASE("positive definiteness keeps W_x positive") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xs(-4.0, 4.0);
    const PhysicalSetup lin{1.0, 0.5, 0.3, LinearPotential{1.0}};
    for (int i = 0; i < 200; ++i) {
        const Microstate ms = random_microstate(rng);
        const double x = xs(rng);
        CHECK(conjugate_momentum(kFree, ms, x) > 0.0);
        CHECK(conjugate_momentum(lin, ms, x) > 0.0);
    }
}

TEST_CASE("zero amplitude is exactly the classical free momentum") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> xs(-20.0, 20.0);
    for (double lambda : {1.0, 0.25, 3.0}) {
        const Microstate ms{lambda, lambda, 0.0};
        for (int i = 0; i < 50; ++i) CHECK(std::abs(conjugate_momentum(kFree, ms, xs(rng)) - 1.0) < 1e-12);
    }
    const Microstate tilted = unit_gauge({1.0, 1.0, 0.1});
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) worst = std::max(worst, std::abs(conjugate_momentum(kFree, tilted, xs(rng)) - 1.0));
    CHECK(worst > 1e-3);
}
