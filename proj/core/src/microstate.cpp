#include "qtraj/microstate.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qtraj/errors.hpp"
#include "qtraj/potentials.hpp"
#include "qtraj/scaled_value.hpp"

namespace qtraj {

namespace {

std::string num(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

}  // namespace


Microstate validate(const Microstate& ms) {
    std::ostringstream why;
    if (!std::isfinite(ms.a) || !std::isfinite(ms.b) || !std::isfinite(ms.c)) {
        why << "coefficients must be finite";
    } else if (ms.a <= 0.0) {
        why << "a = " << ms.a << " must be > 0";
    } else if (ms.b <= 0.0) {
        why << "b = " << ms.b << " must be > 0";
    } else if (ms.gauge() <= 0.0) {
        why << "ab - c^2/4 = " << ms.gauge() << " must be > 0";
    } else {
        return ms;
    }
    throw NonPositiveDefinite("microstate (" + num(ms.a) + ", " + num(ms.b) + ", " +
                              num(ms.c) + ") is not positive definite: " + why.str());
}

Microstate unit_gauge(const Microstate& ms) {
    validate(ms);
    const double s = std::sqrt(ms.gauge());
    return {ms.a / s, ms.b / s, ms.c / s};
}

InitialValues initials_from_coefficients(const PhysicalSetup& setup, const Microstate& ms, double x0) {
    validate(ms);
    const BasisForm form = basis_form(setup, ms.a, ms.b, ms.c, x0);
    const double wx = std::exp(form.log_numerator - form.d.log_magnitude);
    return {wx, -wx * form.d1_over_d};
}

Microstate coefficients_from_initials(const PhysicalSetup& setup, double x0, double Wx0, double Wxx0) {
    if (!std::isfinite(Wx0) || Wx0 <= 0.0) throw DomainError("initial W_x must be finite and > 0");
    if (!std::isfinite(Wxx0)) throw DomainError("initial W_xx must be finite");
    const BasisPair bp = basis(setup, x0);

    // Unit gauge: W_x = hbar w / D, so D, D' and P = a phi'^2 + b theta'^2 + c phi' theta'
    // are fixed by the initial values through D'^2 - 4 P D = -(4ab - c^2) w^2.
    const double w = bp.wronskian;
    const double hw = setup.hbar * w;
    // Work with hatted quantities y / rho, rho = |(phi, theta)|, and derivative
    // rows scaled by 1/w, so the 3x3 system is O(1) even when the basis is huge.
    ScaledValue rho2 = bp.phi * bp.phi + bp.theta * bp.theta;
    ScaledValue rho = rho2;
    rho.log_magnitude *= 0.5;
    const double p = ratio(bp.phi, rho);
    const double t = ratio(bp.theta, rho);
    const double pp = ratio(bp.phi_prime, rho) / w;
    const double tp = ratio(bp.theta_prime, rho) / w;

    // Right-hand sides are D/rho^2, D'/(w rho^2), P/(w^2 rho^2).
    if (!std::isfinite(hw / Wx0)) throw NoRealSolution("initial W_x too small to represent D(x0)");
    const ScaledValue d0 = ScaledValue::from_double(hw / Wx0) / rho2;
    const double d0_hat = d0.to_double();
    const double d1_over_d = -Wxx0 / Wx0;
    const double d1_hat = d1_over_d / w * d0_hat;
    const double p_hat =
        0.25 * d1_over_d * d1_over_d / (w * w) * d0_hat + std::exp(-d0.log_magnitude - 2.0 * rho2.log_magnitude);
    if (!std::isfinite(d0_hat) || !std::isfinite(p_hat)) {
        throw NoRealSolution("initial values out of representable range at x0");
    }

    std::array<std::array<double, 4>, 3> m{{
        {p * p, t * t, p * t, d0_hat},
        {2.0 * p * pp, 2.0 * t * tp, pp * t + p * tp, d1_hat},
        {pp * pp, tp * tp, pp * tp, p_hat},
    }};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        std::swap(m[col], m[pivot]);
        if (m[col][col] == 0.0) throw NoRealSolution("singular initial-value system");
        for (int r = col + 1; r < 3; ++r) {
            const double factor = m[r][col] / m[col][col];
            for (int k = col; k < 4; ++k) m[r][k] -= factor * m[col][k];
        }
    }
    std::array<double, 3> v{};
    for (int r = 2; r >= 0; --r) {
        double acc = m[r][3];
        for (int k = r + 1; k < 3; ++k) acc -= m[r][k] * v[k];
        v[r] = acc / m[r][r];
    }
    // (a, b, c) = v / rho^2
    const double inv_rho2 = std::exp(-rho2.log_magnitude);
    Microstate ms{v[0] * inv_rho2, v[1] * inv_rho2, v[2] * inv_rho2};
    if (!(ms.a > 0.0) || !(ms.b > 0.0) || !(ms.gauge() > 0.0) || !std::isfinite(ms.gauge())) {
        throw NoRealSolution("initial values admit no positive-definite microstate at this energy");
    }
    return unit_gauge(ms);
}

IndeterminacySignature indeterminacy_signature(const Microstate& ms) {
    validate(ms);
    IndeterminacySignature sig;
    const double diff = ms.a - ms.b;
    sig.amplitude_sq = diff * diff + ms.c * ms.c;
    if (diff != 0.0) {
        // cot^{-1}(y) on (0, pi)
        sig.phase = 0.5 * std::numbers::pi - std::atan(ms.c / diff);
    } else if (ms.c != 0.0) {
        // cot^{-1}(+-inf) is 0 mod pi
        sig.phase = 0.0;
    }
    return sig;
}

Microstate microstate_from_amplitude(double amplitude_sq, double angle) {
    if (!std::isfinite(amplitude_sq) || amplitude_sq < 0.0) {
        throw DomainError("amplitude (a-b)^2 + c^2 must be finite and >= 0");
    }
    const double r = std::sqrt(amplitude_sq);
    const double sum = std::sqrt(amplitude_sq + 4.0);
    const double diff = r * std::cos(angle);
    return validate(Microstate{0.5 * (sum + diff), 0.5 * (sum - diff), r * std::sin(angle)});
}

}  // namespace qtraj
