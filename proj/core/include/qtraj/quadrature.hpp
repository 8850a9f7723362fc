#pragma once

#include <functional>

namespace qtraj {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

// Adaptive Gauss-Legendre: each panel's 20-point rule is compared with the sum
// over its two halves and split until the difference is below
// abs_tol * (panel length / total length). Panels still unresolved at
// max_depth are kept; NumericalError if their summed error exceeds abs_tol.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double abs_tol,
                                    int max_depth = 30);

}  // namespace qtraj
