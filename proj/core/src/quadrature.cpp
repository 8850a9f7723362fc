#include "qtraj/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "qtraj/errors.hpp"

namespace qtraj {

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;

struct Panel {
    const std::function<double(double)>& f;
    double total_length;
    double abs_tol;
    int max_depth;
    int evaluations = 0;
    double error = 0.0;
    double unresolved = 0.0;  // from panels cut off at max_depth

    double rule(double lo, double hi) {
        evaluations += 20;
        return Rule::integrate(f, lo, hi);
    }

    double refine(double lo, double hi, double whole, int depth, double parent_diff) {
        const double mid = 0.5 * (lo + hi);
        const double left = rule(lo, mid);
        const double right = rule(mid, hi);
        const double diff = std::abs(left + right - whole);
        const double budget = abs_tol * (hi - lo) / total_length;
        const double noise = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
        // A smooth integrand gains many digits per split; an estimate that stops
        // shrinking is evaluation noise.
        const bool stalled = diff > 0.5 * parent_diff && diff <= 1e-10 * (std::abs(left) + std::abs(right));
        if (diff <= budget || diff <= noise || stalled) {
            error += diff;
            return left + right;
        }
        if (depth >= max_depth) {
            error += diff;
            unresolved += diff;
            return left + right;
        }
        return refine(lo, mid, left, depth + 1, diff) + refine(mid, hi, right, depth + 1, diff);
    }
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double abs_tol,
                                    int max_depth) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("integrate_adaptive: need finite lo < hi");
    }
    Panel panel{f, hi - lo, abs_tol, max_depth};
    const double whole = panel.rule(lo, hi);
    QuadratureResult out;
    out.value = panel.refine(lo, hi, whole, 0, std::numeric_limits<double>::infinity());
    if (panel.unresolved > abs_tol) {
        std::ostringstream msg;
        msg << "adaptive quadrature did not converge: error " << panel.unresolved << " left at depth " << max_depth
            << " exceeds " << abs_tol;
        throw NumericalError(msg.str());
    }
    out.error = panel.error;
    out.evaluations = panel.evaluations;
    return out;
}

}  // namespace qtraj
