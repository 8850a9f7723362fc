#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "qtraj/microstate.hpp"
#include "qtraj/setup.hpp"

/// Brute-force reference paths. Nothing here calls the closed-form kernels
/// except to read initial data.
namespace qtraj::oracle {

struct IntegratorConfig {
    double step = 0.0;  // <= 0 picks default_step()
    double x_start = 0.0;
    double x_end = 1.0;
    // Re-run at step/2 and require endpoint agreement to 1e-8 relative.
    bool convergence_gate = true;
};

// 1e-3 of the shortest natural length on [lo, hi]: the local wavelength where
// E > V, hbar / kappa where E < V, and the Airy length for the linear potential.
double default_step(const PhysicalSetup& setup, double lo, double hi);

/// y(x_i) = y[i] * exp(log_scale[i]), same for y'. Rescaling keeps the
/// stored mantissas O(1) when the solution grows exponentially.
struct SampledSolution {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_prime;
    std::vector<double> log_scale;

    double value(std::size_t i) const;
    double derivative(std::size_t i) const;
};

// Classical RK4 for y'' = -(2m/hbar^2)(E - V(x)) y from x_start to x_end
// (either direction), sampled every step. NumericalError if the gate fails.
SampledSolution integrate_schrodinger(const PhysicalSetup& setup, double y0, double y0_prime,
                                      const IntegratorConfig& config, double log_scale0 = 0.0);

struct NumericMomentum {
    double x = 0.0;
    double Wx = 0.0;
    double log_Wx = 0.0;
    double wronskian = 0.0;
};

// W_x = hbar (ab - c^2/4)^{1/2} w / (a phi^2 + b theta^2 + c phi theta) from
// integrated phi (run backward from the last grid point) and theta (run
// forward from the first), both seeded from the analytic basis there.
// NumericalError if the numeric Wronskian drifts from the analytic one by
// more than 1e-8 relative, or if the step-halving gate fails.
std::vector<NumericMomentum> numeric_conjugate_momentum(const PhysicalSetup& setup, const Microstate& ms,
                                                        std::span<const double> x_grid, double step = 0.0,
                                                        bool convergence_gate = true);

struct FdResult {
    double value = 0.0;
    double error = 0.0;
};

// Central difference of order 1, 2 or 3 at steps h and h/2, combined by one
// Richardson step. h <= 0 picks eps^{1/(order+4)} * scale. DomainError if the
// stencil leaves [lo, hi].
FdResult fd_derivative(const std::function<double(double)>& f, double x, int order, double h = 0.0,
                       double scale = 1.0, double lo = -std::numeric_limits<double>::infinity(),
                       double hi = std::numeric_limits<double>::infinity());

// Mean of f over [x_center - wavelength/2, x_center + wavelength/2] by
// adaptive Gauss-Kronrod, absolute tolerance 1e-10 on the mean.
double quad_cycle_average(const std::function<double(double)>& f, double x_center, double wavelength);

}  // namespace qtraj::oracle
