#include "qtraj/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include "qtraj/errors.hpp"
#include "qtraj/potentials.hpp"

namespace qtraj {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

double norm_of(const Microstate& ms) { return std::sqrt(ms.gauge()); }

BasisForm form_at(const PhysicalSetup& setup, const Microstate& ms, double x) {
    validate(ms);
    return basis_form(setup, ms.a, ms.b, ms.c, x);
}

double log_wx(const BasisForm& form) { return form.log_numerator - form.d.log_magnitude; }

// Step: phi, theta > 0 and theta/phi = exp(2gx), so no branch ever opens.
double step_action_over_hbar(const PhysicalSetup& setup, const Microstate& ms, double x) {
    const double s = norm_of(ms);
    const double two_gx = 2.0 * step_decay_constant(setup) * x / setup.hbar;
    const double e = std::exp(-two_gx);
    // u = (b e^{2gx} + c/2) / s
    const double denom = ms.b + 0.5 * ms.c * e;
    if (two_gx < 30.0) return std::atan((ms.b / e + 0.5 * ms.c) / s);
    return 0.5 * kPi - std::atan(s * e / denom);
}

double action_over_hbar(const PhysicalSetup& setup, const Microstate& ms, double x, ActionConvention convention) {
    validate(ms);
    if (std::holds_alternative<StepPotential>(setup.potential)) {
        if (!admissible(setup, x)) throw DomainError("reduced_action: x < 0 outside the step interior");
        validate(setup);
        return step_action_over_hbar(setup, ms, x);
    }
    const double chi = basis(setup, x).phase;
    const double branch = std::floor((chi + 0.5 * kPi) / kPi);
    const double reduced = chi - branch * kPi;
    const double s = norm_of(ms);
    const double value = std::atan2(ms.b * std::sin(reduced) + 0.5 * ms.c * std::cos(reduced), s * std::cos(reduced));
    return convention == ActionConvention::unwrapped ? branch * kPi + value : value;
}

MomentumDerivatives derivatives_from(const BasisForm& form, double wx) {
    const double r = form.d1_over_d;
    return {-wx * r, wx * (-form.d2_over_d + 2.0 * r * r)};
}

double quantum_from(const PhysicalSetup& setup, const BasisForm& form) {
    const double r = form.d1_over_d;
    return setup.hbar * setup.hbar / (4.0 * setup.m) * (-form.d2_over_d + 0.5 * r * r);
}

double time_from(const PhysicalSetup& setup, const Microstate& ms, const BasisForm& form, double x) {
    const double s = norm_of(ms);
    const double inv_d = std::exp(-form.d.log_magnitude);
    return std::visit(
        [&](const auto& pot) -> double {
            using P = std::decay_t<decltype(pot)>;
            if constexpr (std::is_same_v<P, FreePotential>) {
                return s * setup.m * x / free_wavenumber(setup) * inv_d;
            } else if constexpr (std::is_same_v<P, StepPotential>) {
                return -2.0 * s * setup.m * x / step_decay_constant(setup) * inv_d;
            } else {
                const double scale = std::cbrt(setup.hbar * 2.0 * setup.m / (pot.f * pot.f));
                return -scale * s / kPi * inv_d;
            }
        },
        setup.potential);
}

}  // namespace

double log_conjugate_momentum(const PhysicalSetup& setup, const Microstate& ms, double x) {
    return log_wx(form_at(setup, ms, x));
}

double conjugate_momentum(const PhysicalSetup& setup, const Microstate& ms, double x) {
    return std::exp(log_conjugate_momentum(setup, ms, x));
}

double reduced_action_over_hbar(const PhysicalSetup& setup, const Microstate& ms, double x,
                                ActionConvention convention) {
    return action_over_hbar(setup, ms, x, convention);
}

double reduced_action(const PhysicalSetup& setup, const Microstate& ms, double x, ActionConvention convention) {
    return setup.hbar * action_over_hbar(setup, ms, x, convention);
}

MomentumDerivatives momentum_derivatives(const PhysicalSetup& setup, const Microstate& ms, double x) {
    const BasisForm form = form_at(setup, ms, x);
    return derivatives_from(form, std::exp(log_wx(form)));
}

double quantum_term(const PhysicalSetup& setup, const Microstate& ms, double x) {
    return quantum_from(setup, form_at(setup, ms, x));
}

double qshje_residual(const PhysicalSetup& setup, const Microstate& ms, double x) {
    const BasisForm form = form_at(setup, ms, x);
    const double wx = std::exp(log_wx(form));
    return wx * wx / (2.0 * setup.m) + form.potential - setup.E + quantum_from(setup, form);
}

double jacobi_time(const PhysicalSetup& setup, const Microstate& ms, double x) {
    return time_from(setup, ms, form_at(setup, ms, x), x);
}

double principal_function(const PhysicalSetup& setup, const Microstate& ms, double x) {
    return reduced_action(setup, ms, x) - setup.E * jacobi_time(setup, ms, x);
}

TrajectoryPoint evaluate(const PhysicalSetup& setup, const Microstate& ms, double x, ActionConvention convention) {
    const BasisForm form = form_at(setup, ms, x);
    TrajectoryPoint p;
    p.x = x;
    p.Wx = std::exp(log_wx(form));
    const MomentumDerivatives d = derivatives_from(form, p.Wx);
    p.Wxx = d.Wxx;
    p.Wxxx = d.Wxxx;
    p.quantum_term = quantum_from(setup, form);
    p.residual = p.Wx * p.Wx / (2.0 * setup.m) + form.potential - setup.E + p.quantum_term;
    p.t_minus_t0 = time_from(setup, ms, form, x);
    const double unwrapped = setup.hbar * action_over_hbar(setup, ms, x, ActionConvention::unwrapped);
    p.W = convention == ActionConvention::unwrapped
              ? unwrapped
              : setup.hbar * action_over_hbar(setup, ms, x, ActionConvention::principal);
    p.S = unwrapped - setup.E * p.t_minus_t0;
    for (const double v : {p.W, p.Wx, p.Wxx, p.Wxxx, p.quantum_term, p.residual, p.t_minus_t0, p.S}) {
        if (!std::isfinite(v)) throw NumericalError("evaluate: non-finite result at x = " + num(x));
    }
    return p;
}

std::vector<TableEntry> trajectory_table(const PhysicalSetup& setup, const Microstate& ms,
                                         std::span<const double> x_grid, ActionConvention convention) {
    std::vector<TableEntry> out;
    out.reserve(x_grid.size());
    for (const double x : x_grid) {
        TableEntry entry;
        entry.x = x;
        try {
            entry.point = evaluate(setup, ms, x, convention);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace qtraj
