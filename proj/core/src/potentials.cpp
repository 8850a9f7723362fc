#include "qtraj/potentials.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qtraj/errors.hpp"
#include "qtraj/specfun.hpp"

namespace qtraj {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const PhysicalSetup& setup) {
    if (!std::isfinite(setup.m) || setup.m <= 0.0) throw DomainError("mass must be finite and > 0");
    if (!std::isfinite(setup.E)) throw DomainError("energy must be finite");
    if (!std::isfinite(setup.hbar) || setup.hbar <= 0.0) {
        throw DomainError("hbar must be finite and > 0");
    }
    std::visit(Overloaded{
                   [&](const FreePotential&) {
                       if (setup.E <= 0.0) throw DomainError("free particle requires E > 0");
                   },
                   [&](const StepPotential& p) {
                       if (!std::isfinite(p.U) || p.U <= setup.E) {
                           throw DomainError("step barrier requires U > E");
                       }
                   },
                   [&](const LinearPotential& p) {
                       if (!std::isfinite(p.f) || p.f <= 0.0) {
                           throw DomainError("linear potential requires f > 0");
                       }
                   },
               },
               setup.potential);
}

double potential_energy(const PhysicalSetup& setup, double x) {
    return std::visit(Overloaded{
                          [](const FreePotential&) { return 0.0; },
                          [&](const StepPotential& p) { return x >= 0.0 ? p.U : 0.0; },
                          [&](const LinearPotential& p) { return p.f * x; },
                      },
                      setup.potential);
}

std::string potential_name(const PotentialModel& potential) {
    return std::visit(Overloaded{
                          [](const FreePotential&) { return std::string("free"); },
                          [](const StepPotential&) { return std::string("step"); },
                          [](const LinearPotential&) { return std::string("linear"); },
                      },
                      potential);
}

double free_wavenumber(const PhysicalSetup& setup) { return std::sqrt(2.0 * setup.m * setup.E); }

double step_decay_constant(const PhysicalSetup& setup) {
    const auto* step = std::get_if<StepPotential>(&setup.potential);
    if (step == nullptr) throw DomainError("step_decay_constant: not a step potential");
    return std::sqrt(2.0 * setup.m * (step->U - setup.E));
}

namespace {

const LinearPotential& linear_of(const PhysicalSetup& setup) {
    const auto* lin = std::get_if<LinearPotential>(&setup.potential);
    if (lin == nullptr) throw DomainError("not a linear potential");
    return *lin;
}

// dz/dx = (2mf)^{1/3} / hbar^{2/3}
double airy_scale(const PhysicalSetup& setup) { return 1.0 / airy_length(setup); }

}  // namespace

double airy_length(const PhysicalSetup& setup) {
    const double f = linear_of(setup).f;
    return std::cbrt(setup.hbar * setup.hbar / (2.0 * setup.m * f));
}

double turning_point(const PhysicalSetup& setup) { return setup.E / linear_of(setup).f; }

double airy_argument(const PhysicalSetup& setup, double x) {
    const double f = linear_of(setup).f;
    return std::cbrt(2.0 * setup.m * f) * (x - setup.E / f) / std::cbrt(setup.hbar * setup.hbar);
}

bool admissible(const PhysicalSetup& setup, double x) {
    if (!std::isfinite(x)) return false;
    if (std::holds_alternative<StepPotential>(setup.potential)) return x >= 0.0;
    return true;
}

BasisPair basis(const PhysicalSetup& setup, double x) {
    validate(setup);
    if (!admissible(setup, x)) {
        throw DomainError("basis: x = " + std::to_string(x) + " outside the admissible region of the " +
                          potential_name(setup.potential) + " potential");
    }
    BasisPair out;
    out.x = x;
    const double hbar = setup.hbar;
    std::visit(
        Overloaded{
            [&](const FreePotential&) {
                const double k = free_wavenumber(setup);
                const double g = k / hbar;
                const double alpha = k * x / hbar;
                const double ca = std::cos(alpha);
                const double sa = std::sin(alpha);
                out.phi = ScaledValue::from_double(ca);
                out.theta = ScaledValue::from_double(sa);
                out.phi_prime = ScaledValue::from_double(-g * sa);
                out.theta_prime = ScaledValue::from_double(g * ca);
                out.wronskian = g;
                out.phase = alpha;
                out.q = g * g;
            },
            [&](const StepPotential&) {
                const double g = step_decay_constant(setup) / hbar;
                const double gx = g * x;
                const double log_g = std::log(g);
                out.phi = ScaledValue::from_log(-gx);
                out.theta = ScaledValue::from_log(gx);
                out.phi_prime = ScaledValue::from_log(log_g - gx, -1);
                out.theta_prime = ScaledValue::from_log(log_g + gx);
                out.wronskian = 2.0 * g;
                out.phase = 2.0 * gx > 40.0 ? 0.5 * std::numbers::pi - std::exp(-2.0 * gx)
                                            : std::atan(std::exp(2.0 * gx));
                out.q = -g * g;
            },
            [&](const LinearPotential&) {
                const double sx = airy_scale(setup);
                const double z = airy_argument(setup, x);
                const specfun::AiryScaled airy = specfun::airy_scaled(z);
                const ScaledValue scale = ScaledValue::from_double(sx);
                out.phi = airy.ai;
                out.theta = airy.bi;
                out.phi_prime = airy.ai_prime * scale;
                out.theta_prime = airy.bi_prime * scale;
                out.wronskian = sx * specfun::kOneOverPi;
                out.phase = specfun::airy_phase(z);
                out.q = -sx * sx * z;
            },
        },
        setup.potential);
    return out;
}

namespace {

BasisForm form_from_basis(const BasisPair& bp, double a, double b, double c, double hbar) {
    const ScaledValue sa = ScaledValue::from_double(a);
    const ScaledValue sb = ScaledValue::from_double(b);
    const ScaledValue sc = ScaledValue::from_double(c);
    const ScaledValue two = ScaledValue::from_double(2.0);

    const ScaledValue d = sa * bp.phi * bp.phi + sb * bp.theta * bp.theta + sc * bp.phi * bp.theta;
    const ScaledValue d1 = two * (sa * bp.phi * bp.phi_prime + sb * bp.theta * bp.theta_prime) +
                           sc * (bp.phi_prime * bp.theta + bp.phi * bp.theta_prime);
    const ScaledValue p = sa * bp.phi_prime * bp.phi_prime + sb * bp.theta_prime * bp.theta_prime +
                          sc * bp.phi_prime * bp.theta_prime;
    if (d.sign <= 0) throw NumericalError("basis_form: quadratic form is not positive");

    BasisForm out;
    out.d = d;
    out.d1_over_d = ratio(d1, d);
    out.d2_over_d = 2.0 * ratio(p, d) - 2.0 * bp.q;
    out.log_numerator = std::log(hbar) + 0.5 * std::log(a * b - 0.25 * c * c) + std::log(bp.wronskian);
    out.phase = bp.phase;
    return out;
}

}  // namespace

BasisForm basis_form(const PhysicalSetup& setup, double a, double b, double c, double x) {
    validate(setup);
    if (!admissible(setup, x)) {
        throw DomainError("basis_form: x = " + std::to_string(x) + " outside the admissible region");
    }
    const double norm = std::sqrt(a * b - 0.25 * c * c);
    BasisForm out;
    std::visit(
        Overloaded{
            [&](const FreePotential&) {
                // D = [(a+b) + (a-b) cos 2alpha + c sin 2alpha] / 2
                const double k = free_wavenumber(setup);
                const double g = k / setup.hbar;
                const double alpha = k * x / setup.hbar;
                const double c2 = std::cos(2.0 * alpha);
                const double s2 = std::sin(2.0 * alpha);
                const double d = 0.5 * ((a + b) + (a - b) * c2 + c * s2);
                out.d = ScaledValue::from_double(d);
                out.d1_over_d = g * ((b - a) * s2 + c * c2) / d;
                out.d2_over_d = -2.0 * g * g * ((a - b) * c2 + c * s2) / d;
                out.log_numerator = std::log(norm * k);
                out.phase = alpha;
            },
            [&](const StepPotential&) {
                // D = a e^{-2gx} + b e^{2gx} + c
                const double kappa = step_decay_constant(setup);
                const double g = kappa / setup.hbar;
                const ScaledValue lo = ScaledValue::from_log(std::log(a) - 2.0 * g * x);
                const ScaledValue hi = ScaledValue::from_log(std::log(b) + 2.0 * g * x);
                const ScaledValue d = lo + hi + ScaledValue::from_double(c);
                if (d.sign <= 0) throw NumericalError("basis_form: quadratic form is not positive");
                out.d = d;
                out.d1_over_d = 2.0 * g * ratio(hi - lo, d);
                out.d2_over_d = 4.0 * g * g * ratio(hi + lo, d);
                out.log_numerator = std::log(2.0 * norm * kappa);
                out.phase = basis(setup, x).phase;
            },
            [&](const LinearPotential&) { out = form_from_basis(basis(setup, x), a, b, c, setup.hbar); },
        },
        setup.potential);
    out.potential = potential_energy(setup, x);
    return out;
}

SchrodingerResidual schrodinger_residual(const PhysicalSetup& setup, double x, double step) {
    const BasisPair center = basis(setup, x);
    double q_scale = std::abs(center.q);
    if (std::holds_alternative<LinearPotential>(setup.potential)) {
        const double sx = airy_scale(setup);
        q_scale = std::max(q_scale, sx * sx);
    }
    const double h = step > 0.0 ? step : 1e-2 / std::sqrt(q_scale);
    const bool monotone = std::holds_alternative<StepPotential>(setup.potential);

    std::array<BasisPair, 5> samples;
    for (int j = -2; j <= 2; ++j) samples[j + 2] = j == 0 ? center : basis(setup, x + j * h);

    ScaledValue modulus = center.phi * center.phi + center.theta * center.theta;
    modulus.log_magnitude *= 0.5;

    auto one = [&](auto pick) {
        const ScaledValue ref = monotone ? pick(center) : modulus;
        std::array<double, 5> y{};
        for (int j = 0; j < 5; ++j) y[j] = ratio(pick(samples[j]), ref);
        const double second = (-y[0] + 16.0 * y[1] - 30.0 * y[2] + 16.0 * y[3] - y[4]) / (12.0 * h * h);
        return std::abs(second + center.q * y[2]) / q_scale;
    };
    return {one([](const BasisPair& p) { return p.phi; }), one([](const BasisPair& p) { return p.theta; })};
}

}  // namespace qtraj
