#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtraj/microstate.hpp"
#include "qtraj/setup.hpp"

namespace qtraj {

enum class ActionConvention { unwrapped, principal };

/// Everything the closed forms give at one x.
struct TrajectoryPoint {
    double x = 0.0;
    double W = 0.0;  // unwrapped, K = 0
    double Wx = 0.0;
    double Wxx = 0.0;
    double Wxxx = 0.0;
    double quantum_term = 0.0;  // hbar^2/(4m) {W; x}
    double t_minus_t0 = 0.0;
    double residual = 0.0;
    double S = 0.0;  // W - E (t - t0)
};

// W_x = hbar (ab - c^2/4)^{1/2} w / D, strictly positive. May underflow to 0
// deep in the Step interior; log_conjugate_momentum never does.
double conjugate_momentum(const PhysicalSetup& setup, const Microstate& ms, double x);
double log_conjugate_momentum(const PhysicalSetup& setup, const Microstate& ms, double x);

// W = hbar arctan[(b theta/phi + c/2) / (ab - c^2/4)^{1/2}]. The unwrapped
// branch adds hbar pi per zero of phi, so W is continuous and increasing.
double reduced_action(const PhysicalSetup& setup, const Microstate& ms, double x,
                      ActionConvention convention = ActionConvention::unwrapped);

// W / hbar without the hbar multiply, for limits where W itself is tiny.
double reduced_action_over_hbar(const PhysicalSetup& setup, const Microstate& ms, double x,
                                ActionConvention convention = ActionConvention::unwrapped);

struct MomentumDerivatives {
    double Wxx = 0.0;
    double Wxxx = 0.0;
};

MomentumDerivatives momentum_derivatives(const PhysicalSetup& setup, const Microstate& ms, double x);

double quantum_term(const PhysicalSetup& setup, const Microstate& ms, double x);

// W_x^2/(2m) + V - E + quantum_term
double qshje_residual(const PhysicalSetup& setup, const Microstate& ms, double x);

// t - t0 = dW/dE at fixed x and fixed (a, b, c).
double jacobi_time(const PhysicalSetup& setup, const Microstate& ms, double x);

double principal_function(const PhysicalSetup& setup, const Microstate& ms, double x);

TrajectoryPoint evaluate(const PhysicalSetup& setup, const Microstate& ms, double x,
                         ActionConvention convention = ActionConvention::unwrapped);

struct TableEntry {
    double x = 0.0;
    std::optional<TrajectoryPoint> point;
    std::string error;
};

// One entry per grid point; failures are recorded in `error` and do not stop
// the table.
std::vector<TableEntry> trajectory_table(const PhysicalSetup& setup, const Microstate& ms,
                                         std::span<const double> x_grid,
                                         ActionConvention convention = ActionConvention::unwrapped);

}  // namespace qtraj
