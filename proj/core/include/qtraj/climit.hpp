#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qtraj/microstate.hpp"
#include "qtraj/setup.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj {

// Period of the oscillating term of D at x: pi hbar / (2mE)^{1/2} for Free,
// and for Linear the centered interval over which the Airy phase
// arg(Ai + i Bi) advances by pi. DomainError where E <= V(x).
double local_wavelength(const PhysicalSetup& setup, double x);

struct CycleAverage {
    double mean = 0.0;
    double mean_square = 0.0;
    double variance = 0.0;
    double quantum_term_mean = 0.0;
    double wavelength = 0.0;
};

// Quadrature of W_x, W_x^2 and the quantum term over one local wavelength
// centered at x. Nothing is frozen.
CycleAverage cycle_average(const PhysicalSetup& setup, const Microstate& ms, double x);

// Free only: cycle mean of t - t0 with the explicit x factor held at x while
// the denominator runs over one period.
double average_time(const PhysicalSetup& setup, const Microstate& ms, double x);

/// Free-particle closed forms for the cycle moments.
struct FreeMoments {
    double mean;
    double mean_square;
    double variance;
    double quantum_term_mean;
};
FreeMoments free_moments(const PhysicalSetup& setup, const Microstate& ms);

enum class Observable { Wx, log_Wx, W, W_over_hbar, t_minus_t0, quantum_term, residual };

Observable parse_observable(const std::string& name);
std::string observable_name(Observable obs);

struct SweepRecord {
    double hbar = 0.0;
    double x = 0.0;
    std::string observable;
    double value = 0.0;
    double envelope_min = 0.0;
    double envelope_max = 0.0;
    std::string error;  // empty on success

    bool ok() const { return error.empty(); }
    double envelope_half_width() const { return 0.5 * (envelope_max - envelope_min); }
};

// `points` values from start to stop, equally spaced in log.
std::vector<double> geometric_grid(double start, double stop, int points);

// The observable at x for every hbar, with its min/max over one local
// wavelength (oscillatory regions) or over a window of 1e-2 natural lengths
// otherwise. W_x and log W_x use the exact extrema of D instead: over the
// oscillation phase at fixed Airy modulus (Free, Linear allowed side) or over
// the window (Step).
std::vector<SweepRecord> hbar_sweep(const PhysicalSetup& setup_template, const Microstate& ms, double x,
                                    std::span<const double> hbar_grid, Observable observable,
                                    ActionConvention convention = ActionConvention::unwrapped);

struct TurningWidth {
    double width = 0.0;
    double x_allowed = 0.0;    // outermost allowed-side point still "quantum"
    double x_forbidden = 0.0;  // innermost forbidden-side point already "classical"
};

// Linear only. Allowed side: cycle-averaged |W_x - p_cl| / max(p_cl, eps0) < epsilon,
// eps0 = 1e-12 (2mE)^{1/2}. Forbidden side: W_x < epsilon (2mE)^{1/2}.
// Both boundaries are located by an outward-in scan in Airy units followed by
// bisection. NumericalError if the scan window does not bracket them.
TurningWidth turning_region_width(const PhysicalSetup& setup, const Microstate& ms, double epsilon);

struct EtaFamily {
    std::function<double(double)> eta_of_hbar;
    double base_phase = 0.0;
};

// Per hbar: the unit-gauge microstate with (a-b)^2 + c^2 = eta(hbar), then the
// W_x record at x as in hbar_sweep.
std::vector<SweepRecord> eta_family_sweep(const PhysicalSetup& setup_template, const EtaFamily& family,
                                          std::span<const double> hbar_grid, double x);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms
};

// Ordinary least squares y = slope x + intercept. Needs two distinct x.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace qtraj
