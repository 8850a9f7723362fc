#include "qtraj/climit.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>

#include "qtraj/errors.hpp"
#include "qtraj/potentials.hpp"
#include "qtraj/quadrature.hpp"
#include "qtraj/specfun.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWindowFraction = 1e-2;
constexpr double kTurningScanFar = 20.0;
constexpr double kTurningScanStep = 0.1;

// Absolute tolerance for a cycle mean of size ~scale. Sample points x + u lambda
// carry phase noise of order eps |x| / lambda, which bounds what refinement can reach.
double cycle_tolerance(double scale, double x, double lambda) {
    const double noise = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x) / lambda);
    return scale * std::max(1e-13, noise);
}

bool is_free(const PhysicalSetup& s) { return std::holds_alternative<FreePotential>(s.potential); }
bool is_step(const PhysicalSetup& s) { return std::holds_alternative<StepPotential>(s.potential); }
bool is_linear(const PhysicalSetup& s) { return std::holds_alternative<LinearPotential>(s.potential); }

double solve_bracketed(const std::function<double(double)>& g, double lo, double hi, double glo, double ghi) {
    std::uintmax_t iterations = 200;
    const auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
                                                     boost::math::tools::eps_tolerance<double>(50), iterations);
    return 0.5 * (r.first + r.second);
}

// Half-width h in Airy units with chi(z + h) - chi(z - h) = pi.
double airy_half_period(double z) {
    auto g = [z](double h) { return specfun::airy_phase(z + h) - specfun::airy_phase(z - h) - kPi; };
    double hi = std::min(10.0, 0.5 * kPi / std::sqrt(std::abs(z)));
    double ghi = g(hi);
    for (int i = 0; ghi <= 0.0; ++i) {
        if (i > 60) throw NumericalError("local_wavelength: could not bracket one Airy phase period");
        hi *= 2.0;
        ghi = g(hi);
    }
    return solve_bracketed(g, 0.0, hi, -kPi, ghi);
}

bool oscillatory_at(const PhysicalSetup& setup, double x) {
    if (is_free(setup)) return true;
    if (is_linear(setup)) return airy_argument(setup, x) < 0.0;
    return false;
}

double observable_value(const PhysicalSetup& setup, const Microstate& ms, double x, Observable obs,
                        ActionConvention conv) {
    switch (obs) {
        case Observable::Wx: return conjugate_momentum(setup, ms, x);
        case Observable::log_Wx: return log_conjugate_momentum(setup, ms, x);
        case Observable::W: return reduced_action(setup, ms, x, conv);
        case Observable::W_over_hbar: return reduced_action_over_hbar(setup, ms, x, conv);
        case Observable::t_minus_t0: return jacobi_time(setup, ms, x);
        case Observable::quantum_term: return quantum_term(setup, ms, x);
        case Observable::residual: return qshje_residual(setup, ms, x);
    }
    throw DomainError("unknown observable");
}

struct Extremes {
    double lo;
    double hi;
};

// Min and max of g on [lo, hi]: a 65-point scan then Brent refinement around
// the best samples, in the window coordinate u so the tolerance scales with the window.
Extremes numeric_extremes(const std::function<double(double)>& g, double lo, double hi) {
    constexpr int n = 64;
    const auto at = [&](double u) { return u >= 1.0 ? hi : lo + (hi - lo) * u; };
    std::array<double, n + 1> ys{};
    for (int i = 0; i <= n; ++i) ys[i] = g(at(static_cast<double>(i) / n));
    const int bits = std::numeric_limits<double>::digits / 2;
    auto refine = [&](int i, double sign) {
        const double a = static_cast<double>(std::max(i - 1, 0)) / n;
        const double b = static_cast<double>(std::min(i + 1, n)) / n;
        const auto r = boost::math::tools::brent_find_minima([&](double u) { return sign * g(at(u)); }, a, b, bits);
        return sign * std::min(r.second, sign * ys[i]);
    };
    const auto [min_it, max_it] = std::minmax_element(ys.begin(), ys.end());
    const double lo_val = refine(static_cast<int>(min_it - ys.begin()), 1.0);
    const double hi_val = refine(static_cast<int>(max_it - ys.begin()), -1.0);
    return {std::min(lo_val, *min_it), std::max(hi_val, *max_it)};
}

// Window of the envelope search around x.
std::pair<double, double> envelope_window(const PhysicalSetup& setup, double x) {
    if (oscillatory_at(setup, x)) {
        const double half = 0.5 * local_wavelength(setup, x);
        return {x - half, x + half};
    }
    const double natural = is_step(setup) ? setup.hbar / step_decay_constant(setup) : airy_length(setup);
    const double half = kWindowFraction * natural;
    return {is_step(setup) ? std::max(0.0, x - half) : x - half, x + half};
}

// Extremes of a cos^2 + b sin^2 + c sin cos over the angle.
std::pair<double, double> quadratic_form_range(const Microstate& ms) {
    const double amp = std::sqrt((ms.a - ms.b) * (ms.a - ms.b) + ms.c * ms.c);
    const double q_max = 0.5 * (ms.a + ms.b + amp);
    // (a + b - amp) / 2 = gauge / q_max, without the cancellation
    return {ms.gauge() / q_max, q_max};
}

Extremes momentum_envelope(const PhysicalSetup& setup, const Microstate& ms, double x, bool log_scale) {
    const bool linear_allowed = is_linear(setup) && oscillatory_at(setup, x);
    if (is_free(setup) || linear_allowed) {
        // W_x = hbar s w / (M^2 q(chi)) with phi = M cos chi, theta = M sin chi; M is frozen at x.
        const auto [q_min, q_max] = quadratic_form_range(ms);
        double log_amp = std::log(std::sqrt(ms.gauge()) * free_wavenumber(setup));
        if (linear_allowed) {
            const BasisPair bp = basis(setup, x);
            const ScaledValue m2 = bp.phi * bp.phi + bp.theta * bp.theta;
            log_amp = std::log(setup.hbar * std::sqrt(ms.gauge()) * bp.wronskian) - m2.log_magnitude;
        }
        const Extremes logs{log_amp - std::log(q_max), log_amp - std::log(q_min)};
        if (log_scale) return logs;
        return {std::exp(logs.lo), std::exp(logs.hi)};
    }
    const auto [lo, hi] = envelope_window(setup, x);
    // D is convex in x on the step interior, with its minimum at ln(a/b)/(4g).
    const double l_lo = log_conjugate_momentum(setup, ms, lo);
    const double l_hi = log_conjugate_momentum(setup, ms, hi);
    double top = std::max(l_lo, l_hi);
    const double g = step_decay_constant(setup) / setup.hbar;
    const double x_star = std::log(ms.a / ms.b) / (4.0 * g);
    if (x_star > lo && x_star < hi) top = std::max(top, log_conjugate_momentum(setup, ms, x_star));
    const double bottom = std::min(l_lo, l_hi);
    if (log_scale) return {bottom, top};
    return {std::exp(bottom), std::exp(top)};
}

SweepRecord sweep_point(const PhysicalSetup& setup, const Microstate& ms, double x, Observable obs,
                        ActionConvention conv = ActionConvention::unwrapped) {
    SweepRecord rec;
    rec.hbar = setup.hbar;
    rec.x = x;
    rec.observable = observable_name(obs);
    try {
        rec.value = observable_value(setup, ms, x, obs, conv);
        Extremes env{};
        const bool momentum = obs == Observable::Wx || obs == Observable::log_Wx;
        if (momentum && (is_free(setup) || is_step(setup) || (is_linear(setup) && oscillatory_at(setup, x)))) {
            env = momentum_envelope(setup, ms, x, obs == Observable::log_Wx);
        } else {
            const auto [lo, hi] = envelope_window(setup, x);
            env = numeric_extremes([&](double t) { return observable_value(setup, ms, t, obs, conv); }, lo, hi);
        }
        rec.envelope_min = std::min(env.lo, rec.value);
        rec.envelope_max = std::max(env.hi, rec.value);
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

double local_wavelength(const PhysicalSetup& setup, double x) {
    validate(setup);
    if (is_free(setup)) return kPi * setup.hbar / free_wavenumber(setup);
    if (is_linear(setup)) {
        const double z = airy_argument(setup, x);
        if (!(z < 0.0)) throw DomainError("no oscillation cycle: x is not in the classically allowed region");
        return 2.0 * airy_half_period(z) * airy_length(setup);
    }
    throw DomainError("no oscillation cycle in the step interior");
}

CycleAverage cycle_average(const PhysicalSetup& setup, const Microstate& ms, double x) {
    validate(ms);
    CycleAverage out;
    out.wavelength = local_wavelength(setup, x);
    const double lambda = out.wavelength;
    const double p_ref = std::sqrt(2.0 * setup.m * std::abs(setup.E - potential_energy(setup, x)));

    // Means over u in [-1/2, 1/2], x' = x + u lambda.
    auto mean_of = [&](auto pick, double scale) {
        const auto f = [&](double u) { return pick(evaluate(setup, ms, x + u * lambda)); };
        return integrate_adaptive(f, -0.5, 0.5, cycle_tolerance(scale, x, lambda)).value;
    };
    out.mean = mean_of([](const TrajectoryPoint& p) { return p.Wx; }, p_ref);
    out.mean_square = mean_of([](const TrajectoryPoint& p) { return p.Wx * p.Wx; }, p_ref * p_ref);
    out.quantum_term_mean =
        mean_of([](const TrajectoryPoint& p) { return p.quantum_term; }, p_ref * p_ref / (2.0 * setup.m));
    out.variance = out.mean_square - out.mean * out.mean;
    return out;
}

double average_time(const PhysicalSetup& setup, const Microstate& ms, double x) {
    if (!is_free(setup)) throw DomainError("average_time is defined for the free particle");
    validate(ms);
    const double lambda = local_wavelength(setup, x);
    const double k = free_wavenumber(setup);
    // t - t0 = m x W_x / k^2 with x frozen in the numerator
    const double factor = setup.m * x / (k * k);
    const auto f = [&](double u) { return conjugate_momentum(setup, ms, x + u * lambda); };
    return factor * integrate_adaptive(f, -0.5, 0.5, cycle_tolerance(k, x, lambda)).value;
}

FreeMoments free_moments(const PhysicalSetup& setup, const Microstate& ms) {
    if (!is_free(setup)) throw DomainError("free_moments needs the free particle");
    validate(setup);
    validate(ms);
    const double two_m_e = 2.0 * setup.m * setup.E;
    const double root = std::sqrt(4.0 * ms.a * ms.b - ms.c * ms.c);
    FreeMoments out{};
    out.mean = std::sqrt(two_m_e);
    out.mean_square = two_m_e * (ms.a + ms.b) / root;
    out.variance = two_m_e * (ms.a + ms.b - root) / root;
    out.quantum_term_mean = -out.variance / (2.0 * setup.m);
    return out;
}

Observable parse_observable(const std::string& name) {
    if (name == "Wx") return Observable::Wx;
    if (name == "log_Wx") return Observable::log_Wx;
    if (name == "W") return Observable::W;
    if (name == "W_over_hbar") return Observable::W_over_hbar;
    if (name == "t_minus_t0") return Observable::t_minus_t0;
    if (name == "quantum_term") return Observable::quantum_term;
    if (name == "residual") return Observable::residual;
    throw DomainError("unknown observable '" + name + "'");
}

std::string observable_name(Observable obs) {
    switch (obs) {
        case Observable::Wx: return "Wx";
        case Observable::log_Wx: return "log_Wx";
        case Observable::W: return "W";
        case Observable::W_over_hbar: return "W_over_hbar";
        case Observable::t_minus_t0: return "t_minus_t0";
        case Observable::quantum_term: return "quantum_term";
        case Observable::residual: return "residual";
    }
    return "unknown";
}

std::vector<double> geometric_grid(double start, double stop, int points) {
    if (points < 1) throw DomainError("grid needs at least one point");
    if (!(start > 0.0) || !(stop > 0.0) || !std::isfinite(start) || !std::isfinite(stop)) {
        throw DomainError("geometric grid needs finite positive end points");
    }
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = start;
        return out;
    }
    const double l0 = std::log(start);
    const double l1 = std::log(stop);
    for (int i = 0; i < points; ++i) out[i] = std::exp(l0 + (l1 - l0) * i / (points - 1));
    out.front() = start;
    out.back() = stop;
    return out;
}

std::vector<SweepRecord> hbar_sweep(const PhysicalSetup& setup_template, const Microstate& ms, double x,
                                    std::span<const double> hbar_grid, Observable observable,
                                    ActionConvention convention) {
    validate(ms);
    std::vector<SweepRecord> out;
    out.reserve(hbar_grid.size());
    for (const double hbar : hbar_grid) {
        out.push_back(sweep_point(with_hbar(setup_template, hbar), ms, x, observable, convention));
    }
    return out;
}

TurningWidth turning_region_width(const PhysicalSetup& setup, const Microstate& ms, double epsilon) {
    if (!is_linear(setup)) throw DomainError("turning_region_width needs the linear potential");
    validate(setup);
    validate(ms);
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be finite and > 0");

    const double ell = airy_length(setup);
    const double x_t = turning_point(setup);
    const double p_scale = std::sqrt(2.0 * setup.m * setup.E);
    const double eps0 = 1e-12 * (p_scale > 0.0 ? p_scale : 1.0);
    const double force = std::get<LinearPotential>(setup.potential).f;
    auto x_of = [&](double z) { return x_t + z * ell; };

    // Positive where the allowed side is still quantum.
    auto allowed_excess = [&](double z) {
        const double x = x_of(z);
        const double p_cl = std::sqrt(std::max(0.0, 2.0 * setup.m * (setup.E - force * x)));
        const double mean = cycle_average(setup, ms, x).mean;
        return std::abs(mean - p_cl) / std::max(p_cl, eps0) - epsilon;
    };
    // Positive where the forbidden side is still quantum.
    const double threshold = epsilon * (p_scale > 0.0 ? p_scale : 1.0);
    auto forbidden_excess = [&](double z) {
        return log_conjugate_momentum(setup, ms, x_of(z)) - std::log(threshold);
    };

    const int steps = static_cast<int>(std::lround(kTurningScanFar / kTurningScanStep));
    double z1 = 0.0;
    {
        double z_prev = -kTurningScanFar;
        double g_prev = allowed_excess(z_prev);
        if (g_prev >= 0.0) throw NumericalError("turning_region_width: allowed-side scan does not bracket");
        for (int i = steps - 1; i >= 1; --i) {
            const double z = -kTurningScanStep * i;
            const double g = allowed_excess(z);
            if (g >= 0.0) {
                z1 = solve_bracketed(allowed_excess, z_prev, z, g_prev, g);
                break;
            }
            z_prev = z;
            g_prev = g;
        }
    }
    double z2 = 0.0;
    {
        double z_prev = kTurningScanFar;
        double g_prev = forbidden_excess(z_prev);
        if (g_prev >= 0.0) throw NumericalError("turning_region_width: forbidden-side scan does not bracket");
        for (int i = steps - 1; i >= 0; --i) {
            const double z = kTurningScanStep * i;
            const double g = forbidden_excess(z);
            if (g >= 0.0) {
                z2 = solve_bracketed(forbidden_excess, z, z_prev, g, g_prev);
                break;
            }
            z_prev = z;
            g_prev = g;
        }
    }
    return {(z2 - z1) * ell, x_of(z1), x_of(z2)};
}

std::vector<SweepRecord> eta_family_sweep(const PhysicalSetup& setup_template, const EtaFamily& family,
                                          std::span<const double> hbar_grid, double x) {
    if (!family.eta_of_hbar) throw DomainError("eta family needs eta(hbar)");
    std::vector<SweepRecord> out;
    out.reserve(hbar_grid.size());
    for (const double hbar : hbar_grid) {
        const PhysicalSetup setup = with_hbar(setup_template, hbar);
        SweepRecord rec;
        try {
            const double eta = family.eta_of_hbar(hbar);
            const Microstate ms = microstate_from_amplitude(eta, family.base_phase);
            rec = sweep_point(setup, ms, x, Observable::Wx);
        } catch (const std::exception& e) {
            rec.hbar = hbar;
            rec.x = x;
            rec.observable = observable_name(Observable::Wx);
            rec.error = e.what();
        }
        out.push_back(std::move(rec));
    }
    return out;
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DomainError("fit_line: size mismatch");
    const auto n = static_cast<double>(xs.size());
    if (xs.size() < 2) throw DomainError("fit_line: need at least two points");
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw DomainError("fit_line: all x values coincide");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

}  // namespace qtraj
