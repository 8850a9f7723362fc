#include "qtraj/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qtraj/errors.hpp"
#include "qtraj/potentials.hpp"

namespace qtraj::oracle {

namespace {

std::string num(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}


constexpr double kGateTolerance = 1e-8;
constexpr double kRescaleAbove = 1e100;
constexpr double kRescaleBelow = 1e-100;

struct State {
    double y = 0.0;
    double v = 0.0;
    double log_scale = 0.0;
};

// The step model is the barrier interior, so V = U even where a stage point
// rounds to just below 0.
double q_of(const PhysicalSetup& setup, double x) {
    const auto* step = std::get_if<StepPotential>(&setup.potential);
    const double v = step != nullptr ? step->U : potential_energy(setup, x);
    return 2.0 * setup.m * (setup.E - v) / (setup.hbar * setup.hbar);
}

void renormalize(State& s) {
    const double mag = std::max(std::abs(s.y), std::abs(s.v));
    if (mag == 0.0 || (mag < kRescaleAbove && mag > kRescaleBelow)) return;
    s.y /= mag;
    s.v /= mag;
    s.log_scale += std::log(mag);
}

void rk4_step(const PhysicalSetup& setup, State& s, double x, double h) {
    const double q0 = q_of(setup, x);
    const double qm = q_of(setup, x + 0.5 * h);
    const double q1 = q_of(setup, x + h);
    const double k1y = s.v;
    const double k1v = -q0 * s.y;
    const double k2y = s.v + 0.5 * h * k1v;
    const double k2v = -qm * (s.y + 0.5 * h * k1y);
    const double k3y = s.v + 0.5 * h * k2v;
    const double k3v = -qm * (s.y + 0.5 * h * k2y);
    const double k4y = s.v + h * k3v;
    const double k4v = -q1 * (s.y + h * k3y);
    s.y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    s.v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    renormalize(s);
}

// Advances s from x0 to x1 in equal substeps no longer than step.
void propagate(const PhysicalSetup& setup, State& s, double x0, double x1, double step) {
    if (x1 == x0) return;
    const auto n = static_cast<long>(std::ceil(std::abs(x1 - x0) / step - 1e-9));
    const long steps = std::max(1L, n);
    const double h = (x1 - x0) / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) rk4_step(setup, s, x0 + static_cast<double>(i) * h, h);
}

// |a - b| relative to the size of b, with (y, v) weighted by the local scale.
double state_distance(const State& a, const State& b, double v_weight) {
    const double shift = std::exp(a.log_scale - b.log_scale);
    const double dy = std::abs(a.y * shift - b.y);
    const double dv = std::abs(a.v * shift - b.v) * v_weight;
    const double size = std::max(std::abs(b.y), std::abs(b.v) * v_weight);
    if (size == 0.0) return dy + dv == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::max(dy, dv) / size;
}

double natural_length(const PhysicalSetup& setup, double lo, double hi) {
    const double p_max = std::max(std::sqrt(2.0 * setup.m * std::abs(setup.E - potential_energy(setup, lo))),
                                  std::sqrt(2.0 * setup.m * std::abs(setup.E - potential_energy(setup, hi))));
    const bool allowed = setup.E > potential_energy(setup, lo) || setup.E > potential_energy(setup, hi);
    double length = p_max > 0.0 ? setup.hbar / p_max * (allowed ? std::numbers::pi : 1.0)
                                : std::numeric_limits<double>::infinity();
    if (std::holds_alternative<LinearPotential>(setup.potential)) length = std::min(length, airy_length(setup));
    return length;
}

State seed(const ScaledValue& y, const ScaledValue& yp) {
    const double top = std::max(y.log_magnitude, yp.log_magnitude);
    return {y.sign * std::exp(y.log_magnitude - top), yp.sign * std::exp(yp.log_magnitude - top), top};
}

struct GridRun {
    std::vector<State> phi;
    std::vector<State> theta;
};

GridRun run_grid(const PhysicalSetup& setup, std::span<const double> grid, double step) {
    const std::size_t n = grid.size();
    GridRun run{std::vector<State>(n), std::vector<State>(n)};
    const BasisPair first = basis(setup, grid.front());
    const BasisPair last = basis(setup, grid.back());
    State th = seed(first.theta, first.theta_prime);
    run.theta[0] = th;
    for (std::size_t i = 1; i < n; ++i) {
        propagate(setup, th, grid[i - 1], grid[i], step);
        run.theta[i] = th;
    }
    State ph = seed(last.phi, last.phi_prime);
    run.phi[n - 1] = ph;
    for (std::size_t i = n - 1; i-- > 0;) {
        propagate(setup, ph, grid[i + 1], grid[i], step);
        run.phi[i] = ph;
    }
    return run;
}

}  // namespace

double SampledSolution::value(std::size_t i) const { return y.at(i) * std::exp(log_scale.at(i)); }
double SampledSolution::derivative(std::size_t i) const { return y_prime.at(i) * std::exp(log_scale.at(i)); }

double default_step(const PhysicalSetup& setup, double lo, double hi) {
    validate(setup);
    return 1e-3 * natural_length(setup, lo, hi);
}

SampledSolution integrate_schrodinger(const PhysicalSetup& setup, double y0, double y0_prime,
                                      const IntegratorConfig& config, double log_scale0) {
    validate(setup);
    const double lo = std::min(config.x_start, config.x_end);
    const double hi = std::max(config.x_start, config.x_end);
    if (!admissible(setup, lo) || !admissible(setup, hi)) throw DomainError("integration range not admissible");
    if (!std::isfinite(y0) || !std::isfinite(y0_prime)) throw DomainError("initial data must be finite");
    const double step = config.step > 0.0 ? config.step : default_step(setup, lo, hi);
    const double span = config.x_end - config.x_start;
    const auto steps = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / step - 1e-9)));
    const double h = span / static_cast<double>(steps);

    SampledSolution out;
    out.x.reserve(steps + 1);
    State s{y0, y0_prime, log_scale0};
    auto record = [&](double x) {
        out.x.push_back(x);
        out.y.push_back(s.y);
        out.y_prime.push_back(s.v);
        out.log_scale.push_back(s.log_scale);
    };
    record(config.x_start);
    for (long i = 0; i < steps; ++i) {
        rk4_step(setup, s, config.x_start + static_cast<double>(i) * h, h);
        record(i + 1 == steps ? config.x_end : config.x_start + static_cast<double>(i + 1) * h);
    }

    if (config.convergence_gate) {
        State fine{y0, y0_prime, log_scale0};
        for (long i = 0; i < 2 * steps; ++i) {
            rk4_step(setup, fine, config.x_start + static_cast<double>(i) * 0.5 * h, 0.5 * h);
        }
        const double weight = std::abs(h) * 1e3 / (2.0 * std::numbers::pi);
        const double diff = state_distance(s, fine, weight);
        if (diff > kGateTolerance) {
            throw NumericalError("integrate_schrodinger: step halving changed the endpoint by " +
                                 num(diff) + " (relative); reduce the step");
        }
    }
    return out;
}

std::vector<NumericMomentum> numeric_conjugate_momentum(const PhysicalSetup& setup, const Microstate& ms,
                                                        std::span<const double> x_grid, double step,
                                                        bool convergence_gate) {
    validate(ms);
    if (x_grid.empty()) throw DomainError("numeric_conjugate_momentum: empty grid");
    if (!std::is_sorted(x_grid.begin(), x_grid.end())) throw DomainError("grid must be sorted");
    const double h = step > 0.0 ? step : default_step(setup, x_grid.front(), x_grid.back());
    const double expected_w = basis(setup, x_grid.front()).wronskian;
    const double s = std::sqrt(ms.gauge());

    auto assemble = [&](const GridRun& run) {
        std::vector<NumericMomentum> out(x_grid.size());
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            const State& p = run.phi[i];
            const State& t = run.theta[i];
            const double w = (p.y * t.v - p.v * t.y) * std::exp(p.log_scale + t.log_scale);
            if (std::abs(w - expected_w) > kGateTolerance * std::abs(expected_w)) {
                throw NumericalError("numeric Wronskian " + num(w) + " deviates from " +
                                     num(expected_w) + " at x = " + num(x_grid[i]));
            }
            const double top = 2.0 * std::max(p.log_scale, t.log_scale);
            const double d = ms.a * p.y * p.y * std::exp(2.0 * p.log_scale - top) +
                             ms.b * t.y * t.y * std::exp(2.0 * t.log_scale - top) +
                             ms.c * p.y * t.y * std::exp(p.log_scale + t.log_scale - top);
            if (!(d > 0.0)) throw NumericalError("numeric quadratic form is not positive");
            NumericMomentum m;
            m.x = x_grid[i];
            m.wronskian = w;
            m.log_Wx = std::log(setup.hbar * s * std::abs(w)) - std::log(d) - top;
            m.Wx = std::exp(m.log_Wx);
            out[i] = m;
        }
        return out;
    };

    const std::vector<NumericMomentum> coarse = assemble(run_grid(setup, x_grid, h));
    if (convergence_gate) {
        const std::vector<NumericMomentum> fine = assemble(run_grid(setup, x_grid, 0.5 * h));
        for (std::size_t i = 0; i < coarse.size(); ++i) {
            const double diff = std::abs(std::expm1(coarse[i].log_Wx - fine[i].log_Wx));
            if (diff > kGateTolerance) {
                throw NumericalError("numeric_conjugate_momentum: step halving changed W_x by " +
                                     num(diff) + " at x = " + num(x_grid[i]));
            }
        }
    }
    return coarse;
}

FdResult fd_derivative(const std::function<double(double)>& f, double x, int order, double h, double scale,
                       double lo, double hi) {
    if (order < 1 || order > 3) throw DomainError("fd_derivative: order must be 1, 2 or 3");
    if (h <= 0.0) {
        h = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 4)) * std::abs(scale);
    }
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("fd_derivative: invalid step");
    const double reach = order == 3 ? 2.0 * h : h;
    if (x - reach < lo || x + reach > hi) throw DomainError("fd_derivative: stencil leaves the domain");

    auto central = [&](double step) {
        switch (order) {
            case 1: return (f(x + step) - f(x - step)) / (2.0 * step);
            case 2: return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
            default:
                return (f(x + 2.0 * step) - 2.0 * f(x + step) + 2.0 * f(x - step) - f(x - 2.0 * step)) /
                       (2.0 * step * step * step);
        }
    };
    const double coarse = central(h);
    const double fine = central(0.5 * h);
    return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
}

double quad_cycle_average(const std::function<double(double)>& f, double x_center, double wavelength) {
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw DomainError("wavelength must be > 0");
    const double lo = x_center - 0.5 * wavelength;
    const double hi = x_center + 0.5 * wavelength;
    double error = 0.0;
    double l1 = 0.0;
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, 1e-12, &error, &l1);
    const double mean_error = error / wavelength;
    if (!(mean_error <= 1e-10)) {
        throw NumericalError("quad_cycle_average: achieved tolerance " + num(mean_error) +
                             " exceeds 1e-10");
    }
    return integral / wavelength;
}

}  // namespace qtraj::oracle
