#include "qtraj/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qtraj/errors.hpp"

namespace qtraj::specfun {
namespace {

constexpr double kAi0 = 0.355028053887817239260063186004;
constexpr double kAip0 = -0.258819403792806798405183560189;
constexpr double kBi0 = 0.614926627446000735150922369094;
constexpr double kBip0 = 0.448288357353826357914823710399;

constexpr double kAnchorSpacing = 0.5;
constexpr double kChainStep = 0.25;
// Ai on z > 0 is continued backward from here, where the asymptotic
// expansion is accurate far below double precision.
constexpr double kAiChainStart = kAirySwitch + 3.0;
constexpr int kMaxTerms = 120;

const double kLogSqrtPi = 0.5 * std::log(std::numbers::pi);
const double kLog2SqrtPi = std::log(2.0) + kLogSqrtPi;

struct Jet {
    double y;
    double dy;
};

// One Taylor step of y'' = z y from z0 to z0 + h.
Jet taylor_step(double z0, Jet jet, double h) {
    double c_nm1 = jet.y;           // c_{n-1}
    double c_n = jet.dy;            // c_n, starting at n = 1
    double c_np1 = 0.5 * z0 * jet.y;  // c_{n+1}
    double y = jet.y + jet.dy * h;
    double dy = jet.dy;
    double hp = h;  // h^n
    int quiet = 0;
    for (int n = 1; n < kMaxTerms; ++n) {
        // Shift to c_{n+1}, add its contribution.
        const double term_y = c_np1 * hp * h;
        const double term_dy = (n + 1) * c_np1 * hp;
        y += term_y;
        dy += term_dy;
        const double c_np2 = (z0 * c_n + c_nm1) / ((n + 2.0) * (n + 1.0));
        c_nm1 = c_n;
        c_n = c_np1;
        c_np1 = c_np2;
        hp *= h;
        const double scale = std::abs(y) + std::abs(dy) * std::abs(h) + 1e-300;
        if (std::abs(term_y) + std::abs(term_dy * h) <= 1e-18 * scale) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
    }
    return {y, dy};
}

Jet continue_to(double z_from, Jet jet, double z_to) {
    const int steps = static_cast<int>(std::lround(std::abs(z_to - z_from) / kChainStep));
    const double h = steps == 0 ? 0.0 : (z_to - z_from) / steps;
    double z = z_from;
    for (int i = 0; i < steps; ++i) {
        jet = taylor_step(z, jet, h);
        z = z_from + (i + 1) * h;
    }
    return jet;
}

// u_k and v_k of the Airy asymptotic expansions (DLMF 9.7.2).
struct AsymptoticCoefficients {
    std::array<double, kMaxTerms> u{};
    std::array<double, kMaxTerms> v{};
    AsymptoticCoefficients() {
        u[0] = 1.0;
        v[0] = 1.0;
        for (int k = 1; k < kMaxTerms; ++k) {
            u[k] = u[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
                   ((2.0 * k - 1.0) * 216.0 * k);
            v[k] = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u[k];
        }
    }
};

const AsymptoticCoefficients& coefficients() {
    static const AsymptoticCoefficients c;
    return c;
}

// Sum of sign_k * coeff[first + stride*k] / zeta^(first + stride*k), truncated
// at convergence or at the smallest term.
double asymptotic_sum(const std::array<double, kMaxTerms>& coeff, double zeta, int first,
                      int stride, bool alternate) {
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    double zpow = std::pow(zeta, -first);
    const double zstep = std::pow(zeta, -stride);
    double sgn = 1.0;
    for (int idx = first; idx < kMaxTerms; idx += stride) {
        const double term = coeff[idx] * zpow;
        if (std::abs(term) > std::abs(prev)) break;
        sum += sgn * term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        prev = term;
        zpow *= zstep;
        if (alternate) sgn = -sgn;
    }
    return sum;
}

struct Oscillatory {
    double ai, aip, bi, bip, phase;
};

// z = -x with x >= 4.
Oscillatory oscillatory_asymptotic(double x) {
    const auto& c = coefficients();
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const double pu = asymptotic_sum(c.u, zeta, 0, 2, true);
    const double qu = asymptotic_sum(c.u, zeta, 1, 2, true);
    const double pv = asymptotic_sum(c.v, zeta, 0, 2, true);
    const double qv = asymptotic_sum(c.v, zeta, 1, 2, true);
    const double beta = zeta - 0.25 * std::numbers::pi;
    const double cb = std::cos(beta);
    const double sb = std::sin(beta);
    const double x14 = std::sqrt(std::sqrt(x));
    const double m0 = 1.0 / (std::sqrt(std::numbers::pi) * x14);
    const double n0 = x14 / std::sqrt(std::numbers::pi);
    return {m0 * (cb * pu + sb * qu), n0 * (sb * pv - cb * qv), m0 * (-sb * pu + cb * qu),
            n0 * (cb * pv + sb * qv), -beta + std::atan2(qu, pu)};
}

// z >= 4, log-scaled.
AiryScaled growing_asymptotic(double z) {
    const auto& c = coefficients();
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    const double s_ai = asymptotic_sum(c.u, zeta, 0, 1, true);
    const double s_aip = asymptotic_sum(c.v, zeta, 0, 1, true);
    const double s_bi = asymptotic_sum(c.u, zeta, 0, 1, false);
    const double s_bip = asymptotic_sum(c.v, zeta, 0, 1, false);
    const double quarter_log = 0.25 * std::log(z);
    AiryScaled out;
    out.ai = ScaledValue::from_log(-zeta - kLog2SqrtPi - quarter_log + std::log(s_ai), 1);
    out.ai_prime = ScaledValue::from_log(-zeta - kLog2SqrtPi + quarter_log + std::log(s_aip), -1);
    out.bi = ScaledValue::from_log(zeta - kLogSqrtPi - quarter_log + std::log(s_bi), 1);
    out.bi_prime = ScaledValue::from_log(zeta - kLogSqrtPi + quarter_log + std::log(s_bip), 1);
    return out;
}

struct AnchorTable {
    // index k <-> |z| = k * kAnchorSpacing
    std::vector<Jet> ai_pos, bi_pos, ai_neg, bi_neg;

    AnchorTable() {
        const int n = static_cast<int>(std::lround((kAirySwitch + 3.0) / kAnchorSpacing)) + 1;
        ai_pos.resize(n);
        bi_pos.resize(n);
        ai_neg.resize(n);
        bi_neg.resize(n);

        Jet bi{kBi0, kBip0};
        Jet ai{kAi0, kAip0};
        Jet bi_m{kBi0, kBip0};
        bi_pos[0] = bi;
        ai_neg[0] = ai;
        bi_neg[0] = bi_m;
        for (int k = 1; k < n; ++k) {
            const double z0 = (k - 1) * kAnchorSpacing;
            bi = continue_to(z0, bi, z0 + kAnchorSpacing);
            ai = continue_to(-z0, ai, -z0 - kAnchorSpacing);
            bi_m = continue_to(-z0, bi_m, -z0 - kAnchorSpacing);
            bi_pos[k] = bi;
            ai_neg[k] = ai;
            bi_neg[k] = bi_m;
        }

        // Backward continuation of the recessive solution is stable.
        const AiryScaled start = growing_asymptotic(kAiChainStart);
        Jet a{start.ai.to_double(), start.ai_prime.to_double()};
        const int k_start = static_cast<int>(std::lround(kAiChainStart / kAnchorSpacing));
        for (int k = k_start; k >= 0; --k) {
            const double z = k * kAnchorSpacing;
            if (k < k_start) a = continue_to(z + kAnchorSpacing, a, z);
            if (k < n) ai_pos[k] = a;
        }
        ai_pos[0] = {kAi0, kAip0};
    }
};

const AnchorTable& anchors() {
    static const AnchorTable table;
    return table;
}

struct Plain {
    double ai, aip, bi, bip;
};

Plain taylor_plain(double z) {
    const auto& t = anchors();
    const int k = static_cast<int>(std::lround(std::abs(z) / kAnchorSpacing));
    if (k >= static_cast<int>(t.ai_pos.size())) {
        throw DomainError("airy_taylor: |z| beyond the anchor table");
    }
    const double z0 = (z >= 0.0 ? 1.0 : -1.0) * k * kAnchorSpacing;
    const double h = z - z0;
    const Jet a = taylor_step(z0, z >= 0.0 ? t.ai_pos[k] : t.ai_neg[k], h);
    const Jet b = taylor_step(z0, z >= 0.0 ? t.bi_pos[k] : t.bi_neg[k], h);
    return {a.y, a.dy, b.y, b.dy};
}

void require_finite(double z, const char* what) {
    if (!std::isfinite(z)) throw DomainError(std::string(what) + ": non-finite argument");
}

}  // namespace

AiryScaled airy_taylor(double z) {
    require_finite(z, "airy_taylor");
    const Plain p = taylor_plain(z);
    return {ScaledValue::from_double(p.ai), ScaledValue::from_double(p.aip),
            ScaledValue::from_double(p.bi), ScaledValue::from_double(p.bip)};
}

AiryScaled airy_asymptotic(double z) {
    require_finite(z, "airy_asymptotic");
    if (std::abs(z) < 4.0) throw DomainError("airy_asymptotic: |z| must be >= 4");
    if (z > 0.0) return growing_asymptotic(z);
    const Oscillatory o = oscillatory_asymptotic(-z);
    return {ScaledValue::from_double(o.ai), ScaledValue::from_double(o.aip),
            ScaledValue::from_double(o.bi), ScaledValue::from_double(o.bip)};
}

AiryScaled airy_scaled(double z) {
    require_finite(z, "airy_scaled");
    if (std::abs(z) <= kAirySwitch) return airy_taylor(z);
    return airy_asymptotic(z);
}

AiryValue airy_ai(double z) {
    require_finite(z, "airy_ai");
    if (std::abs(z) <= kAirySwitch) {
        const Plain p = taylor_plain(z);
        return {p.ai, p.aip};
    }
    if (z < 0.0) {
        const Oscillatory o = oscillatory_asymptotic(-z);
        return {o.ai, o.aip};
    }
    const AiryScaled s = growing_asymptotic(z);
    return {s.ai.to_double(), s.ai_prime.to_double()};
}

AiryValue airy_bi(double z) {
    require_finite(z, "airy_bi");
    if (std::abs(z) <= kAirySwitch) {
        const Plain p = taylor_plain(z);
        return {p.bi, p.bip};
    }
    if (z < 0.0) {
        const Oscillatory o = oscillatory_asymptotic(-z);
        return {o.bi, o.bip};
    }
    const AiryScaled s = growing_asymptotic(z);
    constexpr double kMaxLog = 709.0;
    if (s.bi.log_magnitude > kMaxLog || s.bi_prime.log_magnitude > kMaxLog) {
        throw RangeError("airy_bi: Bi(" + std::to_string(z) +
                         ") overflows double precision; use airy_scaled");
    }
    return {s.bi.to_double(), s.bi_prime.to_double()};
}

double airy_phase(double z) {
    require_finite(z, "airy_phase");
    if (z > kAirySwitch) {
        const AiryScaled s = growing_asymptotic(z);
        return 0.5 * std::numbers::pi - std::atan(ratio(s.ai, s.bi));
    }
    if (z < -kAirySwitch) return oscillatory_asymptotic(-z).phase;
    const Plain p = taylor_plain(z);
    const double principal = std::atan2(p.bi, p.ai);
    if (z >= 0.0) return principal;
    const double x = -z;
    const double estimate = 0.25 * std::numbers::pi - 2.0 / 3.0 * x * std::sqrt(x);
    const double turns = std::round((estimate - principal) / (2.0 * std::numbers::pi));
    return principal + 2.0 * std::numbers::pi * turns;
}

}  // namespace qtraj::specfun
