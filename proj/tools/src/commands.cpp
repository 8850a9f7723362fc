#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <variant>

#include "json.hpp"
#include "qtraj/climit.hpp"
#include "qtraj/cli/app.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/potentials.hpp"

namespace qtraj::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    return std::get<std::string>(c);
}

Json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? Json(*d) : Json(nullptr);
    return Json(std::get<std::string>(c));
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
}

Json microstate_json(const Microstate& ms) {
    Json j;
    j["a"] = ms.a;
    j["b"] = ms.b;
    j["c"] = ms.c;
    j["gauge"] = ms.gauge();
    return j;
}

void write_json(std::ostream& out, const RunConfig& cfg, const Table& t, const std::optional<Microstate>& ms,
                const Json& summary, const Json& fits) {
    Json doc;
    doc["schema"] = 1;
    doc["command"] = cfg.command;
    Json config = Json::object();
    for (const auto& [k, v] : cfg.resolved()) config[k] = v;
    doc["config"] = config;
    if (ms) doc["microstate"] = microstate_json(*ms);
    doc["columns"] = t.columns;
    Json rows = Json::array();
    for (const auto& row : t.rows) {
        Json r = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    doc["summary"] = summary;
    if (!fits.is_null()) doc["fits"] = fits;
    out << doc.dump(2) << '\n';
}

void emit(std::ostream& out, const RunConfig& cfg, const Table& t, const std::optional<Microstate>& ms,
          const Json& summary, const Json& fits = Json()) {
    if (cfg.format == Format::csv) {
        write_csv(out, t);
    } else {
        write_json(out, cfg, t, ms, summary, fits);
    }
}

double single_hbar(const RunConfig& cfg) {
    if (cfg.hbar_grid) throw ConfigError(cfg.command + " takes --hbar, not --hbar-grid");
    return cfg.hbar.value_or(1.0);
}

std::vector<double> x_values(const RunConfig& cfg) {
    if (cfg.x) return {*cfg.x};
    if (cfg.x_grid) return cfg.x_grid->values();
    throw ConfigError(cfg.command + " needs --x or --x-grid");
}

PhysicalSetup free_side(const PhysicalSetup& step) {
    PhysicalSetup s = step;
    s.potential = FreePotential{};
    return s;
}

// (a, b, c) for the model serving x >= 0 (Step) or everywhere (Free, Linear).
// Initial values are converted once, at the given setup's hbar.
Microstate resolve_microstate(const RunConfig& cfg, const PhysicalSetup& setup) {
    if (cfg.abc) return validate(*cfg.abc);
    if (!cfg.initials) throw ConfigError(cfg.command + " needs --abc or --initials");
    const double x0 = (*cfg.initials)[0];
    const double wx0 = (*cfg.initials)[1];
    const double wxx0 = (*cfg.initials)[2];
    if (std::holds_alternative<StepPotential>(setup.potential) && x0 < 0.0) {
        const PhysicalSetup outside = free_side(setup);
        const Microstate ms_free = coefficients_from_initials(outside, x0, wx0, wxx0);
        const InitialValues at_edge = initials_from_coefficients(outside, ms_free, 0.0);
        return coefficients_from_initials(setup, 0.0, at_edge.Wx0, at_edge.Wxx0);
    }
    return coefficients_from_initials(setup, x0, wx0, wxx0);
}

Json fit_json(double x, const std::string& kind, const std::vector<double>& xs, const std::vector<double>& ys) {
    Json j;
    j["x"] = number(x);
    j["kind"] = kind;
    if (xs.size() < 2) {
        j["slope"] = nullptr;
        j["intercept"] = nullptr;
        j["residual"] = nullptr;
        return j;
    }
    try {
        const LineFit fit = fit_line(xs, ys);
        j["slope"] = number(fit.slope);
        j["intercept"] = number(fit.intercept);
        j["residual"] = number(fit.residual);
    } catch (const DomainError&) {
        j["slope"] = nullptr;
        j["intercept"] = nullptr;
        j["residual"] = nullptr;
    }
    return j;
}

std::vector<double> sweep_hbars(const RunConfig& cfg) {
    if (!cfg.hbar_grid) throw ConfigError("sweep needs --hbar-grid");
    return cfg.hbar_grid->values();
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

int cmd_trajectory(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
    const PhysicalSetup setup = cfg.setup(single_hbar(cfg));
    validate(setup);
    const Microstate ms = resolve_microstate(cfg, setup);
    const std::vector<double> xs = x_values(cfg);

    std::vector<TableEntry> entries;
    const bool step = std::holds_alternative<StepPotential>(setup.potential);
    const bool any_outside = step && std::any_of(xs.begin(), xs.end(), [](double x) { return x < 0.0; });
    if (any_outside) {
        // x < 0 has V = 0: continue with the Free solution matching W_x, W_xx at the edge,
        // W and t - t0 shifted to be continuous there.
        const PhysicalSetup outside = free_side(setup);
        const InitialValues edge = initials_from_coefficients(setup, ms, 0.0);
        const Microstate ms_free = coefficients_from_initials(outside, 0.0, edge.Wx0, edge.Wxx0);
        const TrajectoryPoint in0 = evaluate(setup, ms, 0.0, cfg.convention);
        const TrajectoryPoint out0 = evaluate(outside, ms_free, 0.0, cfg.convention);
        for (const double x : xs) {
            std::vector<TableEntry> one =
                trajectory_table(x < 0.0 ? outside : setup, x < 0.0 ? ms_free : ms, std::span(&x, 1), cfg.convention);
            if (x < 0.0 && one[0].point) {
                TrajectoryPoint& p = *one[0].point;
                p.W += in0.W - out0.W;
                p.t_minus_t0 += in0.t_minus_t0 - out0.t_minus_t0;
                p.S = p.W - setup.E * p.t_minus_t0;
            }
            entries.push_back(std::move(one[0]));
        }
    } else {
        entries = trajectory_table(setup, ms, xs, cfg.convention);
    }

    bool failed = false;
    for (const auto& e : entries) {
        if (!e.point) {
            diag << "x = " << format_number(e.x) << ": " << e.error << '\n';
            failed = true;
        }
    }
    if (failed) return kExitNumeric;

    Table t{{"x", "W", "Wx", "Wxx", "Wxxx", "quantum_term", "t_minus_t0", "S", "residual"}, {}};
    double max_res = 0.0;
    for (const auto& e : entries) {
        const TrajectoryPoint& p = *e.point;
        t.rows.push_back({p.x, p.W, p.Wx, p.Wxx, p.Wxxx, p.quantum_term, p.t_minus_t0, p.S, p.residual});
        max_res = std::max(max_res, std::abs(p.residual));
    }
    Json summary;
    summary["rows"] = t.rows.size();
    summary["max_abs_residual"] = max_res;
    emit(out, cfg, t, ms, summary);
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
    const std::vector<double> hbars = sweep_hbars(cfg);
    const PhysicalSetup base = cfg.setup(hbars.front());
    validate(base);
    const bool step = std::holds_alternative<StepPotential>(base.potential);
    Table t{{"hbar", "x", "observable", "value", "envelope_min", "envelope_max"}, {}};
    Json fits = Json::array();
    std::optional<Microstate> echoed;
    bool failed = false;

    auto report = [&](const SweepRecord& r) {
        if (!r.ok()) {
            diag << "hbar = " << format_number(r.hbar) << ", x = " << format_number(r.x) << ": " << r.error
                 << '\n';
            failed = true;
        }
    };

    if (cfg.observable == "turning_width") {
        if (cfg.eta) throw ConfigError("--eta applies to the Wx observable only");
        if (!std::holds_alternative<LinearPotential>(base.potential)) {
            throw ConfigError("turning_width needs --potential linear");
        }
        const Microstate ms = resolve_microstate(cfg, base);
        echoed = ms;
        std::vector<double> lx;
        std::vector<double> ly;
        const double xt = turning_point(base);
        for (const double h : hbars) {
            const PhysicalSetup s = with_hbar(base, h);
            try {
                const TurningWidth w = turning_region_width(s, ms, cfg.epsilon);
                t.rows.push_back({h, xt, std::string("turning_width"), w.width, w.width, w.width});
                lx.push_back(std::log(h));
                ly.push_back(std::log(w.width));
            } catch (const NumericalError& e) {
                report(SweepRecord{h, xt, "turning_width", kNaN, kNaN, kNaN, e.what()});
            }
        }
        fits.push_back(fit_json(xt, "log(width) vs log(hbar)", lx, ly));
    } else {
        const std::vector<double> xs = x_values(cfg);
        if (step && std::any_of(xs.begin(), xs.end(), [](double x) { return x < 0.0; })) {
            throw ConfigError("step sweeps run in the interior x >= 0; use --potential free for x < 0");
        }
        for (const double x : xs) {
            if (!admissible(base, x)) throw ConfigError("x = " + format_number(x) + " is not admissible");
        }
        std::vector<std::vector<SweepRecord>> per_x;
        std::string kind;
        if (cfg.eta) {
            if (cfg.observable != "Wx") throw ConfigError("--eta applies to the Wx observable only");
            if (cfg.abc || cfg.initials) throw ConfigError("--eta selects the microstates; drop --abc/--initials");
            const EtaExpr eta = parse_eta(*cfg.eta);
            for (const double h : hbars) {
                if (!(eta(h) >= 0.0) || !std::isfinite(eta(h))) {
                    throw ConfigError("eta(" + format_number(h) + ") = " + format_number(eta(h)) +
                                      " is not a valid squared amplitude");
                }
            }
            const EtaFamily family{[eta](double h) { return eta(h); }, 0.0};
            for (const double x : xs) per_x.push_back(eta_family_sweep(base, family, hbars, x));
            kind = "log(envelope half width) vs log(hbar)";
        } else {
            Observable obs{};
            try {
                obs = parse_observable(cfg.observable);
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
            const Microstate ms = resolve_microstate(cfg, base);
            echoed = ms;
            for (const double x : xs) per_x.push_back(hbar_sweep(base, ms, x, hbars, obs, cfg.convention));
            if (step && obs == Observable::Wx) {
                kind = "log(value) vs 1/hbar";
            } else if (step && obs == Observable::log_Wx) {
                kind = "value vs 1/hbar";
            } else {
                kind = "value vs hbar";
            }
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::vector<double> fx;
            std::vector<double> fy;
            for (const SweepRecord& r : per_x[i]) {
                report(r);
                if (!r.ok()) continue;
                t.rows.push_back({r.hbar, r.x, r.observable, r.value, r.envelope_min, r.envelope_max});
                double u = r.hbar;
                double v = r.value;
                if (kind == "log(value) vs 1/hbar") {
                    u = 1.0 / r.hbar;
                    v = std::log(r.value);
                } else if (kind == "value vs 1/hbar") {
                    u = 1.0 / r.hbar;
                } else if (kind == "log(envelope half width) vs log(hbar)") {
                    u = std::log(r.hbar);
                    v = std::log(r.envelope_half_width());
                }
                if (std::isfinite(u) && std::isfinite(v)) {
                    fx.push_back(u);
                    fy.push_back(v);
                }
            }
            fits.push_back(fit_json(xs[i], kind, fx, fy));
        }
    }
    if (failed) return kExitNumeric;
    Json summary;
    summary["rows"] = t.rows.size();
    emit(out, cfg, t, echoed, summary, fits);
    return kExitOk;
}

int cmd_average(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const PhysicalSetup setup = cfg.setup(single_hbar(cfg));
    validate(setup);
    if (!cfg.x) throw ConfigError("average needs a single --x");
    const double x = *cfg.x;
    const Microstate ms = resolve_microstate(cfg, setup);
    const CycleAverage avg = cycle_average(setup, ms, x);

    const bool free = std::holds_alternative<FreePotential>(setup.potential);
    FreeMoments ref{kNaN, kNaN, kNaN, kNaN};
    double t_avg = kNaN;
    double t_ref = kNaN;
    if (free) {
        ref = free_moments(setup, ms);
        t_avg = average_time(setup, ms, x);
        t_ref = std::sqrt(setup.m / (2.0 * setup.E)) * x;
    }
    Table t{{"mean", "mean_square", "variance", "quantum_term_mean", "mean_ref", "mean_square_ref", "variance_ref",
             "quantum_term_mean_ref", "mean_delta", "mean_square_delta", "variance_delta", "quantum_term_mean_delta",
             "average_time", "average_time_ref", "average_time_delta"},
            {}};
    t.rows.push_back({avg.mean, avg.mean_square, avg.variance, avg.quantum_term_mean, ref.mean, ref.mean_square,
                      ref.variance, ref.quantum_term_mean, avg.mean - ref.mean, avg.mean_square - ref.mean_square,
                      avg.variance - ref.variance, avg.quantum_term_mean - ref.quantum_term_mean, t_avg, t_ref,
                      t_avg - t_ref});
    Json summary;
    summary["x"] = x;
    summary["wavelength"] = avg.wavelength;
    emit(out, cfg, t, ms, summary);
    return kExitOk;
}

int cmd_residual_audit(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
    const double hbar = single_hbar(cfg);
    std::vector<std::string> potentials;
    if (cfg.potential == "all") {
        potentials = {"free", "step", "linear"};
    } else {
        potentials = {cfg.potential};
    }
    if (cfg.abc || cfg.initials) throw ConfigError("residual-audit draws its own microstates");
    if (cfg.x) throw ConfigError("residual-audit takes --x-grid, not --x");

    std::mt19937_64 rng(cfg.seed);
    Table t{{"potential", "sample", "a", "b", "c", "max_abs_residual", "relative_residual"}, {}};
    double worst_abs = 0.0;
    double worst_rel = 0.0;
    bool failed = false;
    for (const std::string& name : potentials) {
        RunConfig local = cfg;
        local.potential = name;
        const PhysicalSetup setup = local.setup(hbar);
        validate(setup);
        const std::vector<double> grid = cfg.x_grid ? cfg.x_grid->values() : audit_grid(setup, 50);
        for (const double x : grid) {
            if (!admissible(setup, x)) {
                throw ConfigError("x = " + format_number(x) + " is not admissible for " + name);
            }
        }
        const double scale = residual_scale(setup, grid);
        for (int i = 0; i < cfg.samples; ++i) {
            const Microstate ms = random_microstate(rng);
            double worst = 0.0;
            for (const double x : grid) {
                try {
                    worst = std::max(worst, std::abs(qshje_residual(setup, ms, x)));
                } catch (const std::exception& e) {
                    diag << name << " sample " << i << " x = " << format_number(x) << ": " << e.what() << '\n';
                    failed = true;
                    worst = kNaN;
                    break;
                }
            }
            t.rows.push_back({name, static_cast<double>(i), ms.a, ms.b, ms.c, worst, worst / scale});
            if (std::isfinite(worst)) {
                worst_abs = std::max(worst_abs, worst);
                worst_rel = std::max(worst_rel, worst / scale);
            }
        }
    }
    if (failed) return kExitNumeric;
    Json summary;
    summary["rows"] = t.rows.size();
    summary["max_abs_residual"] = worst_abs;
    summary["max_relative_residual"] = worst_rel;
    emit(out, cfg, t, std::nullopt, summary);
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& diag) {
    try {
        const RunConfig cfg = parse_args(args);
        std::ostringstream buffer;
        int code = kExitOk;
        if (cfg.command == "trajectory") {
            code = cmd_trajectory(cfg, buffer, diag);
        } else if (cfg.command == "sweep") {
            code = cmd_sweep(cfg, buffer, diag);
        } else if (cfg.command == "average") {
            code = cmd_average(cfg, buffer, diag);
        } else {
            code = cmd_residual_audit(cfg, buffer, diag);
        }
        if (code != kExitOk) return code;
        if (cfg.out.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) {
                diag << "error: cannot write '" << cfg.out << "'\n";
                return kExitConfig;
            }
            file << buffer.str();
        }
        return kExitOk;
    } catch (const HelpRequested& h) {
        out << h.what();
        return kExitOk;
    } catch (const ConfigError& e) {
        diag << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        diag << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        diag << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

Microstate random_microstate(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> log_coef(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> frac(-0.9, 0.9);
    Microstate ms;
    ms.a = std::exp(log_coef(rng));
    ms.b = std::exp(log_coef(rng));
    ms.c = 2.0 * frac(rng) * std::sqrt(ms.a * ms.b);
    return ms;
}

std::vector<double> audit_grid(const PhysicalSetup& setup, int points) {
    validate(setup);
    GridSpec g;
    g.points = points;
    if (std::holds_alternative<FreePotential>(setup.potential)) {
        const double lambda = local_wavelength(setup, 0.0);
        g.start = -2.5 * lambda;
        g.stop = 2.5 * lambda;
    } else if (std::holds_alternative<StepPotential>(setup.potential)) {
        const double g_inv = setup.hbar / step_decay_constant(setup);
        g.start = 0.0;
        g.stop = 10.0 * g_inv;
    } else {
        const double xt = turning_point(setup);
        const double ell = airy_length(setup);
        g.start = xt - 10.0 * ell;
        g.stop = xt + 5.0 * ell;
    }
    return g.values();
}

double residual_scale(const PhysicalSetup& setup, const std::vector<double>& grid) {
    double s = std::abs(setup.E);
    if (const auto* step = std::get_if<StepPotential>(&setup.potential)) s = std::max(s, std::abs(step->U - setup.E));
    if (const auto* lin = std::get_if<LinearPotential>(&setup.potential)) {
        for (const double x : grid) s = std::max(s, std::abs(setup.E - lin->f * x));
    }
    return s;
}

}  // namespace qtraj::cli
