#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "qtraj/climit.hpp"
#include "qtraj/cli/app.hpp"
#include "qtraj/errors.hpp"

namespace qtraj::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& raw, const std::string& what) {
    const std::string text = trim(raw);
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(what + ": '" + raw + "' is not a finite number");
    }
    return v;
}

std::vector<double> parse_list(const std::string& text, std::size_t count, char sep, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(parse_number(item, what));
    if (out.size() != count) {
        throw ConfigError(what + ": expected " + std::to_string(count) + " values in '" + text + "'");
    }
    return out;
}

// key=value lines, '#' comments, blank lines ignored.
std::vector<std::string> config_file_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty() || key == "config") {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
        }
        out.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
    return out;
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
            path = args[i + 1];
            ++i;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    return path;
}

}  // namespace

std::vector<double> GridSpec::values() const {
    if (points < 1) throw ConfigError("grid is empty");
    if (geometric) {
        try {
            return geometric_grid(start, stop, points);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("hbar grid: ") + e.what());
        }
    }
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = start;
        return out;
    }
    for (int i = 0; i < points; ++i) out[i] = start + (stop - start) * i / (points - 1);
    out.back() = stop;
    return out;
}

GridSpec parse_grid(const std::string& text, bool geometric) {
    std::stringstream ss(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ConfigError("grid '" + text + "': expected start:stop:points");
    GridSpec g;
    g.start = parse_number(parts[0], "grid start");
    g.stop = parse_number(parts[1], "grid stop");
    const double n = parse_number(parts[2], "grid points");
    if (n != std::floor(n) || n > 1e7) throw ConfigError("grid '" + text + "': points must be an integer");
    g.points = static_cast<int>(n);
    g.geometric = geometric;
    if (g.points < 1) throw ConfigError("grid '" + text + "' is empty");
    if (geometric && (g.start <= 0.0 || g.stop <= 0.0)) {
        throw ConfigError("grid '" + text + "': geometric end points must be > 0");
    }
    return g;
}

double EtaExpr::operator()(double hbar) const { return c0 * std::pow(hbar, p) + c1; }

EtaExpr parse_eta(const std::string& text) {
    std::string s;
    for (const char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    }
    const std::string num = R"(([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))";
    static const std::regex with_hbar("^(?:" + num + R"(\*)?hbar(?:\^)" + num + ")?(?:" + num + ")?$");
    static const std::regex constant("^" + num + "$");
    std::smatch m;
    EtaExpr e;
    if (std::regex_match(s, m, constant)) {
        e.c0 = 0.0;
        e.p = 0.0;
        e.c1 = parse_number(m[1], "eta");
        return e;
    }
    if (!std::regex_match(s, m, with_hbar)) {
        throw ConfigError("eta '" + text + "': expected c0*hbar^p + c1");
    }
    e.c0 = m[1].matched ? parse_number(m[1], "eta c0") : 1.0;
    e.p = m[2].matched ? parse_number(m[2], "eta p") : 1.0;
    if (m[3].matched) {
        const std::string tail = m[3];
        if (tail.front() != '+' && tail.front() != '-') {
            throw ConfigError("eta '" + text + "': expected '+' before the constant");
        }
        e.c1 = parse_number(tail, "eta c1");
    }
    return e;
}

PhysicalSetup RunConfig::setup(double hbar_value) const {
    PhysicalSetup s;
    s.m = m;
    s.E = E;
    s.hbar = hbar_value;
    if (potential == "free") {
        s.potential = FreePotential{};
    } else if (potential == "step") {
        s.potential = StepPotential{U};
    } else if (potential == "linear") {
        s.potential = LinearPotential{f};
    } else {
        throw ConfigError("unknown potential '" + potential + "'");
    }
    return s;
}

std::map<std::string, std::string> RunConfig::resolved() const {
    auto grid = [](const GridSpec& g) {
        return format_number(g.start) + ":" + format_number(g.stop) + ":" + std::to_string(g.points);
    };
    std::map<std::string, std::string> out;
    out["command"] = command;
    out["potential"] = potential;
    if (potential == "step") out["U"] = format_number(U);
    if (potential == "linear") out["f"] = format_number(f);
    out["m"] = format_number(m);
    out["E"] = format_number(E);
    if (hbar) out["hbar"] = format_number(*hbar);
    if (hbar_grid) out["hbar-grid"] = grid(*hbar_grid);
    if (abc) out["abc"] = format_number(abc->a) + "," + format_number(abc->b) + "," + format_number(abc->c);
    if (initials) {
        out["initials"] = format_number((*initials)[0]) + "," + format_number((*initials)[1]) + "," +
                          format_number((*initials)[2]);
    }
    if (x) out["x"] = format_number(*x);
    if (x_grid) out["x-grid"] = grid(*x_grid);
    out["observable"] = observable;
    out["format"] = format == Format::csv ? "csv" : "json";
    out["convention"] = convention == ActionConvention::unwrapped ? "unwrapped" : "principal";
    if (eta) out["eta"] = *eta;
    out["epsilon"] = format_number(epsilon);
    out["samples"] = std::to_string(samples);
    out["seed"] = std::to_string(seed);
    return out;
}

RunConfig parse_args(const std::vector<std::string>& args) {
    std::vector<std::string> merged;
    if (const auto path = find_config_path(args)) merged = config_file_args(*path);
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            ++i;
            continue;
        }
        if (args[i].rfind("--config=", 0) == 0) continue;
        merged.push_back(args[i]);
    }

    CLI::App app{"Closed-form quantum trajectories and their classical limit", "qtraj"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_help_flag("-h,--help", "Print this help message and exit");

    RunConfig cfg;
    std::string hbar_grid;
    std::string abc;
    std::string initials;
    std::string x_grid;
    std::string format = "csv";
    std::string convention = "unwrapped";
    std::string eta;
    std::optional<double> hbar;
    std::optional<double> x;

    app.add_option("--config", "key=value file; flags override its entries");
    app.add_option("--potential", cfg.potential, "free | step | linear (residual-audit also takes all)")
        ->check(CLI::IsMember({"free", "step", "linear", "all"}));
    app.add_option("--U", cfg.U, "step height");
    app.add_option("--f", cfg.f, "linear slope");
    app.add_option("--m", cfg.m, "mass");
    app.add_option("--E", cfg.E, "energy");
    app.add_option("--hbar", hbar, "hbar");
    app.add_option("--hbar-grid", hbar_grid, "start:stop:points, geometric");
    app.add_option("--abc", abc, "microstate coefficients a,b,c");
    app.add_option("--initials", initials, "x0,Wx0,Wxx0");
    app.add_option("--x", x, "position");
    app.add_option("--x-grid", x_grid, "start:stop:points, linear spacing");
    app.add_option("--observable", cfg.observable,
                   "Wx | log_Wx | W | W_over_hbar | t_minus_t0 | quantum_term | residual | turning_width");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", cfg.out, "output path (default stdout)");
    app.add_option("--convention", convention, "unwrapped | principal")
        ->check(CLI::IsMember({"unwrapped", "principal"}));
    app.add_option("--eta", eta, "eta family c0*hbar^p + c1 (sweep)");
    app.add_option("--epsilon", cfg.epsilon, "turning-width threshold");
    app.add_option("--samples", cfg.samples, "residual-audit microstates");
    app.add_option("--seed", cfg.seed, "residual-audit seed");

    for (const char* name : {"trajectory", "sweep", "average", "residual-audit"}) {
        app.add_subcommand(name)->fallthrough();
    }
    app.get_subcommand("trajectory")->description("closed-form table over an x grid");
    app.get_subcommand("sweep")->description("observable and envelope over an hbar grid");
    app.get_subcommand("average")->description("cycle moments with closed-form references");
    app.get_subcommand("residual-audit")->description("residual identity over random microstates");

    std::vector<std::string> reversed(merged.rbegin(), merged.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    cfg.command = app.get_subcommands().front()->get_name();
    cfg.hbar = hbar;
    cfg.x = x;
    if (!hbar_grid.empty()) cfg.hbar_grid = parse_grid(hbar_grid, true);
    if (!x_grid.empty()) cfg.x_grid = parse_grid(x_grid, false);
    if (!abc.empty()) {
        const auto v = parse_list(abc, 3, ',', "--abc");
        cfg.abc = Microstate{v[0], v[1], v[2]};
    }
    if (!initials.empty()) cfg.initials = parse_list(initials, 3, ',', "--initials");
    if (!eta.empty()) cfg.eta = eta;
    cfg.format = format == "json" ? Format::json : Format::csv;
    cfg.convention = convention == "principal" ? ActionConvention::principal : ActionConvention::unwrapped;

    if (cfg.abc && cfg.initials) throw ConfigError("give exactly one of --abc and --initials");
    if (cfg.x && cfg.x_grid) throw ConfigError("give at most one of --x and --x-grid");
    if (cfg.hbar && cfg.hbar_grid) throw ConfigError("give at most one of --hbar and --hbar-grid");
    if (cfg.potential == "all" && cfg.command != "residual-audit") {
        throw ConfigError("--potential all is only meaningful for residual-audit");
    }
    if (cfg.samples < 1) throw ConfigError("--samples must be >= 1");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw ConfigError("--epsilon must lie in (0, 1)");
    return cfg;
}

}  // namespace qtraj::cli
