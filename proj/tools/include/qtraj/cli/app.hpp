#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtraj/microstate.hpp"
#include "qtraj/setup.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --help; carries the usage text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    bool geometric = false;

    std::vector<double> values() const;
};

// "start:stop:points". `geometric` selects log spacing.
GridSpec parse_grid(const std::string& text, bool geometric);

/// eta(hbar) = c0 * hbar^p + c1
struct EtaExpr {
    double c0 = 0.0;
    double p = 1.0;
    double c1 = 0.0;

    double operator()(double hbar) const;
};

// Accepts "c0*hbar^p + c1" with any of c0*, ^p and + c1 omitted, or a bare
// constant. Whitespace is ignored.
EtaExpr parse_eta(const std::string& text);

enum class Format { csv, json };

struct RunConfig {
    std::string command;
    std::string potential = "free";
    double U = 1.0;
    double f = 1.0;
    double m = 1.0;
    double E = 0.5;
    std::optional<double> hbar;
    std::optional<GridSpec> hbar_grid;
    std::optional<Microstate> abc;
    std::optional<std::vector<double>> initials;  // x0, Wx0, Wxx0
    std::optional<double> x;
    std::optional<GridSpec> x_grid;
    std::string observable = "Wx";
    Format format = Format::csv;
    std::string out;
    ActionConvention convention = ActionConvention::unwrapped;
    std::optional<std::string> eta;
    double epsilon = 0.05;
    int samples = 200;
    std::uint64_t seed = 20240601;

    PhysicalSetup setup(double hbar_value) const;
    std::map<std::string, std::string> resolved() const;
};

// Parses argv-style arguments (program name excluded). Values from
// --config FILE (key=value lines, keys are long flag names) are overridden by
// flags. Throws ConfigError or HelpRequested.
RunConfig parse_args(const std::vector<std::string>& args);

int cmd_trajectory(const RunConfig& config, std::ostream& out, std::ostream& diag);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& diag);
int cmd_average(const RunConfig& config, std::ostream& out, std::ostream& diag);
int cmd_residual_audit(const RunConfig& config, std::ostream& out, std::ostream& diag);

// Full front end: parse, dispatch, route output to --out or `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& diag);

// 17 significant digits, scientific, locale independent.
std::string format_number(double v);

/// Random positive-definite microstate: a, b log-uniform on [0.1, 10],
/// c uniform with |c| <= 1.8 (ab)^{1/2}.
Microstate random_microstate(std::mt19937_64& rng);

// Grid used by residual-audit when no --x-grid is given. Linear grids span
// z in [-10, 5] around the turning point; Step grids span 2 kappa x / hbar in
// [0, 20]; Free grids cover five wavelengths.
std::vector<double> audit_grid(const PhysicalSetup& setup, int points);

// max(|E|, |U - E|, |E - f x|) over the grid
double residual_scale(const PhysicalSetup& setup, const std::vector<double>& grid);

}  // namespace qtraj::cli
