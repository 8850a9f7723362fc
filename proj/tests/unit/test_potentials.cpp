#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qtraj/errors.hpp"
#include "qtraj/potentials.hpp"
#include "qtraj/specfun.hpp"

using namespace qtraj;

namespace {

PhysicalSetup free_setup(double hbar = 1.0) { return {1.0, 0.5, hbar, FreePotential{}}; }
PhysicalSetup step_setup(double hbar) { return {1.0, 0.5, hbar, StepPotential{1.0}}; }
PhysicalSetup linear_setup(double hbar, double f = 1.0) { return {1.0, 0.5, hbar, LinearPotential{f}}; }

double wronskian_of(const BasisPair& p) { return (p.phi * p.theta_prime - p.phi_prime * p.theta).to_double(); }

}  // namespace

TEST_CASE("free basis at the origin") {
    const BasisPair p = basis(free_setup(), 0.0);
    CHECK(p.phi.to_double() == 1.0);
    CHECK(p.theta.to_double() == 0.0);
    CHECK(p.theta_prime.to_double() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.wronskian == doctest::Approx(1.0));
}

TEST_CASE("linear basis at the turning point is Ai(0), Bi(0)") {
    const PhysicalSetup s = linear_setup(0.3, 2.0);
    const BasisPair p = basis(s, turning_point(s));
    CHECK(airy_argument(s, turning_point(s)) == 0.0);
    CHECK(ratio(p.phi, p.theta) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("step exponents are carried in log space") {
    const BasisPair p = basis(step_setup(0.01), 1.0);
    CHECK(p.theta.log_magnitude - p.phi.log_magnitude == doctest::Approx(200.0).epsilon(1e-14));
    const BasisPair deep = basis(step_setup(1e-6), 1.0);
    CHECK(std::isfinite(deep.theta.log_magnitude));
    CHECK(deep.theta.log_magnitude == doctest::Approx(1e6));
}

TEST_CASE("admissible region and parameter checks") {
    CHECK_THROWS_AS(basis(step_setup(0.1), -0.1), DomainError);
    CHECK_FALSE(admissible(step_setup(0.1), -1e-12));
    CHECK_THROWS_AS(basis(PhysicalSetup{1.0, 1.5, 1.0, StepPotential{1.0}}, 0.5), DomainError);
    CHECK_THROWS_AS(basis(PhysicalSetup{1.0, -0.5, 1.0, FreePotential{}}, 0.5), DomainError);
    CHECK_THROWS_AS(basis(PhysicalSetup{1.0, 0.5, 1.0, LinearPotential{0.0}}, 0.5), DomainError);
    CHECK_THROWS_AS(basis(PhysicalSetup{1.0, 0.5, 0.0, FreePotential{}}, 0.5), DomainError);
    CHECK_THROWS_AS(basis(free_setup(), std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("Schrodinger residual by finite differences") {
    for (double x : {-3.0, 0.0, 0.37, 2.5}) {
        const auto r = schrodinger_residual(free_setup(), x);
        CHECK(r.phi < 1e-8);
        CHECK(r.theta < 1e-8);
    }
    {
        const PhysicalSetup s = linear_setup(0.5);
        const auto r = schrodinger_residual(s, turning_point(s));
        CHECK(r.phi < 1e-6);
        CHECK(r.theta < 1e-6);
    }
    for (double x : {0.1, 0.5, 3.0}) {
        const auto r = schrodinger_residual(step_setup(0.01), x);
        CHECK(r.phi < 1e-8);
        CHECK(r.theta < 1e-8);
    }
}

TEST_CASE("Wronskian is constant in x") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> free_x(-50.0, 50.0);
    std::uniform_real_distribution<double> step_x(0.0, 2.0);
    std::uniform_real_distribution<double> lin_x(-3.0, 1.5);
    const PhysicalSetup setups[] = {free_setup(0.2), step_setup(0.05), linear_setup(0.1)};
    for (const PhysicalSetup& s : setups) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            double x1 = 0.0;
            double x2 = 0.0;
            if (std::holds_alternative<FreePotential>(s.potential)) {
                x1 = free_x(rng);
                x2 = free_x(rng);
            } else if (std::holds_alternative<StepPotential>(s.potential)) {
                x1 = step_x(rng);
                x2 = step_x(rng);
            } else {
                x1 = lin_x(rng);
                x2 = lin_x(rng);
            }
            const double w1 = wronskian_of(basis(s, x1));
            const double w2 = wronskian_of(basis(s, x2));
            worst = std::max(worst, std::abs(w1 / w2 - 1.0));
            worst = std::max(worst, std::abs(w1 / basis(s, x1).wronskian - 1.0));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("weak force approaches the free wavenumber") {
    // local wavelength from the phase slope at x = 0
    const double hbar = 0.01;
    const PhysicalSetup s = linear_setup(hbar, 1e-4);
    const double h = 1e-5;
    const double slope = (basis(s, h).phase - basis(s, -h).phase) / (2.0 * h);
    const double wavelength = 2.0 * std::numbers::pi / slope;
    const double free_wavelength = 2.0 * std::numbers::pi * hbar / std::sqrt(2.0 * s.m * s.E);
    CHECK(std::abs(wavelength / free_wavelength - 1.0) < 1e-3);
}

TEST_CASE("basis_form agrees with the generic quadratic form") {
    // the closed forms for free and step must equal a phi^2 + b theta^2 + c phi theta
    const double a = 1.7;
    const double b = 0.9;
    const double c = -0.4;
    for (const PhysicalSetup& s : {free_setup(0.3), step_setup(0.3)}) {
        for (double x : {0.0, 0.2, 0.9}) {
            const BasisPair p = basis(s, x);
            const double d = (ScaledValue::from_double(a) * p.phi * p.phi + ScaledValue::from_double(b) * p.theta * p.theta +
                              ScaledValue::from_double(c) * p.phi * p.theta)
                                 .to_double();
            const BasisForm f = basis_form(s, a, b, c, x);
            CHECK(f.d.to_double() == doctest::Approx(d).epsilon(1e-13));
            CHECK(f.phase == doctest::Approx(p.phase).epsilon(1e-14));
        }
    }
}
