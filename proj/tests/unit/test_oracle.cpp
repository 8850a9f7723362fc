#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qtraj/climit.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/oracle.hpp"
#include "qtraj/potentials.hpp"
#include "qtraj/specfun.hpp"
#include "qtraj/trajectory.hpp"

using namespace qtraj;
namespace orc = qtraj::oracle;

namespace {

constexpr double kPi = std::numbers::pi;
const PhysicalSetup kFree{1.0, 0.5, 1.0, FreePotential{}};

double endpoint_error(double step) {
    const PhysicalSetup s = with_hbar(kFree, 0.1);
    orc::IntegratorConfig cfg{step, 0.0, 1.0, false};
    const auto sol = orc::integrate_schrodinger(s, 1.0, 0.0, cfg);
    return std::abs(sol.value(sol.x.size() - 1) - std::cos(1.0 / 0.1));
}

}  // namespace

TEST_CASE("free integration reproduces cosine over ten wavelengths") {
    const PhysicalSetup s = with_hbar(kFree, 0.05);
    const double period = 2.0 * kPi * s.hbar;
    orc::IntegratorConfig cfg{0.0, 0.0, 10.0 * period, true};
    const auto sol = orc::integrate_schrodinger(s, 1.0, 0.0, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.x.size(); ++i) {
        worst = std::max(worst, std::abs(sol.value(i) - std::cos(sol.x[i] / s.hbar)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("linear integration through the turning point") {
    const PhysicalSetup s{1.0, 0.5, 0.1, LinearPotential{1.0}};
    const double x0 = -0.5;
    const double x1 = 0.9;
    const double ell = airy_length(s);
    const double alpha = 0.8;
    const double beta = -0.35;
    auto exact = [&](double x) {
        const double z = airy_argument(s, x);
        return alpha * specfun::airy_ai(z).value + beta * specfun::airy_bi(z).value;
    };
    auto exact_prime = [&](double x) {
        const double z = airy_argument(s, x);
        return (alpha * specfun::airy_ai(z).derivative + beta * specfun::airy_bi(z).derivative) / ell;
    };
    orc::IntegratorConfig cfg{0.0, x0, x1, true};
    const auto sol = orc::integrate_schrodinger(s, exact(x0), exact_prime(x0), cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.x.size(); ++i) {
        const double x = sol.x[i];
        const double scale = std::hypot(specfun::airy_ai(airy_argument(s, x)).value,
                                        specfun::airy_bi(airy_argument(s, x)).value);
        worst = std::max(worst, std::abs(sol.value(i) - exact(x)) / scale);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("zero data stays zero") {
    orc::IntegratorConfig cfg{0.0, -1.0, 1.0, true};
    const auto sol = orc::integrate_schrodinger(PhysicalSetup{1.0, 0.5, 0.2, LinearPotential{1.0}}, 0.0, 0.0, cfg);
    for (std::size_t i = 0; i < sol.x.size(); ++i) CHECK(sol.value(i) == 0.0);
}

TEST_CASE("fourth-order convergence") {
    const double e1 = endpoint_error(2e-3);
    const double e2 = endpoint_error(1e-3);
    CHECK(std::abs(e1 / e2 - 16.0) < 2.0);
}

TEST_CASE("convergence gate rejects a coarse step") {
    orc::IntegratorConfig cfg{0.2, 0.0, 5.0, true};
    CHECK_THROWS_AS(orc::integrate_schrodinger(with_hbar(kFree, 0.1), 1.0, 0.0, cfg), NumericalError);
    CHECK_THROWS_AS(orc::integrate_schrodinger(PhysicalSetup{1.0, 0.5, 0.1, StepPotential{1.0}}, 1.0, 0.0,
                                               orc::IntegratorConfig{0.0, -1.0, 1.0, true}),
                    DomainError);
}

TEST_CASE("step interior integration runs in log space") {
    const PhysicalSetup s{1.0, 0.5, 1e-3, StepPotential{1.0}};
    orc::IntegratorConfig cfg{0.0, 0.0, 1.0, true};
    const double g = step_decay_constant(s) / s.hbar;
    const auto sol = orc::integrate_schrodinger(s, 1.0, g, cfg);
    const std::size_t last = sol.x.size() - 1;
    CHECK(sol.log_scale[last] + std::log(sol.y[last]) == doctest::Approx(1000.0).epsilon(1e-10));
}

TEST_CASE("numeric conjugate momentum matches the closed forms") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> log_ab(-1.0, 1.0);
    std::uniform_real_distribution<double> frac(-0.9, 0.9);
    auto random_ms = [&] {
        const double a = std::exp(log_ab(rng));
        const double b = std::exp(log_ab(rng));
        return Microstate{a, b, 2.0 * std::sqrt(a * b) * frac(rng)};
    };
    {
        std::vector<double> grid;
        for (int i = 0; i <= 20; ++i) grid.push_back(-1.0 + 0.1 * i);
        const auto wx = orc::numeric_conjugate_momentum(kFree, {1.0, 1.0, 0.0}, grid);
        for (const auto& p : wx) CHECK(std::abs(p.Wx - 1.0) < 1e-6);
    }
    {
        const PhysicalSetup s{1.0, 0.5, 0.05, LinearPotential{1.0}};
        std::vector<double> grid;
        for (int i = 0; i <= 30; ++i) grid.push_back(0.2 + 0.02 * i);  // straddles x_t = 0.5
        for (int k = 0; k < 5; ++k) {
            const Microstate ms = random_ms();
            const auto wx = orc::numeric_conjugate_momentum(s, ms, grid);
            for (const auto& p : wx) CHECK(std::abs(p.Wx / conjugate_momentum(s, ms, p.x) - 1.0) < 1e-6);
        }
    }
    {
        const PhysicalSetup s{1.0, 0.5, 0.02, StepPotential{1.0}};
        std::vector<double> grid;
        for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
        for (int k = 0; k < 5; ++k) {
            const Microstate ms = random_ms();
            const auto wx = orc::numeric_conjugate_momentum(s, ms, grid);
            for (const auto& p : wx) {
                CHECK(std::abs(std::expm1(p.log_Wx - log_conjugate_momentum(s, ms, p.x))) < 1e-6);
            }
        }
    }
}

TEST_CASE("finite differences") {
    const auto cubic = [](double x) { return 2.0 * x * x * x - 3.0 * x * x + x - 5.0; };
    // stencils are exact on cubics, so any h works; 0.1 keeps rounding out of the way
    CHECK(std::abs(orc::fd_derivative(cubic, 0.7, 3, 0.1).value - 12.0) < 1e-9);
    CHECK(std::abs(orc::fd_derivative(cubic, 0.7, 2, 0.1).value - (12.0 * 0.7 - 6.0)) < 1e-9);
    CHECK(std::abs(orc::fd_derivative(cubic, 0.7, 1, 0.1).value - (6.0 * 0.49 - 6.0 * 0.7 + 1.0)) < 1e-9);
    CHECK(std::abs(orc::fd_derivative(cubic, 0.7, 3).value - 12.0) < 1e-7);
    const auto r = orc::fd_derivative([](double x) { return std::sin(x); }, 1.0, 1);
    CHECK(std::abs(r.value - std::cos(1.0)) < 1e-10);
    CHECK(r.error < 1e-6);
    CHECK_THROWS_AS(orc::fd_derivative(cubic, 0.0, 1, 0.1, 1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(orc::fd_derivative(cubic, 0.5, 4), DomainError);

    // dW/dE against the Jacobi time
    const PhysicalSetup s{1.0, 0.5, 0.2, LinearPotential{1.0}};
    const Microstate ms{1.4, 0.8, 0.3};
    const auto w = [&](double e) { return reduced_action(with_energy(s, e), ms, 0.1); };
    const double t = jacobi_time(s, ms, 0.1);
    CHECK(std::abs(orc::fd_derivative(w, s.E, 1, 0.0, 0.1).value - t) < 1e-6 * std::abs(t));
}

TEST_CASE("cycle-average quadrature") {
    CHECK(std::abs(orc::quad_cycle_average([](double x) { return std::cos(x); }, 0.3, 2.0 * kPi)) < 1e-12);
    const PhysicalSetup s = with_hbar(kFree, 0.01);
    const Microstate ms{2.0, 1.0, 0.5};
    const double lambda = local_wavelength(s, 0.0);
    const double mean = orc::quad_cycle_average([&](double x) { return conjugate_momentum(s, ms, x); }, 0.0, lambda);
    CHECK(std::abs(mean - 1.0) < 1e-8);
    const double sq = orc::quad_cycle_average(
        [&](double x) {
            const double w = conjugate_momentum(s, ms, x);
            return w * w;
        },
        0.0, lambda);
    CHECK(std::abs(sq - free_moments(s, ms).mean_square) < 1e-8);
    CHECK_THROWS_AS(orc::quad_cycle_average([](double) { return 1.0; }, 0.0, 0.0), DomainError);
}
