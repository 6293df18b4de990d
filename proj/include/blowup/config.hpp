#pragma once

// Declarative experiment description. Configs are JSON objects with a fixed
// schema: unknown keys and wrongly typed values are rejected with the dotted
// path of the offending key, and every omitted key takes the default below.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blowup/grid.hpp"
#include "blowup/problem.hpp"
#include "blowup/solver.hpp"

namespace blowup {

enum class Mode { profile, solve, verify_rate, sweep, ko_check, mixed };

/// "profile", "solve", "verify-rate", "sweep", "ko-check", "mixed".
std::string to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct GeometryConfig {
    GeometryKind kind = GeometryKind::interval;
    double lo = 0.0;
    double hi = 1.0;
    int dimension = 1;
};

struct NonlinearityConfig {
    /// "power", "exponential", "power_log" or "log_power".
    std::string family = "power";
    /// q for power and power_log, p for log_power; unused for exponential.
    double parameter = 3.0;
};

/// Shorthand accepted on the command line and in configs: "linear", "sqrt",
/// "exponential", or "family:parameter" such as "power:2" or "log_power:1.5".
NonlinearityConfig parse_nonlinearity(std::string_view text);

struct WeightConfig {
    /// "power" or "exp_flat".
    std::string family = "power";
    double gamma = 0.0;
    double nu = 1.0;
};

struct PotentialConfig {
    double c = 1.0;
    WeightConfig k;
    /// perturbation(d) = amplitude sin(frequency d).
    double perturbation_amplitude = 0.0;
    double perturbation_frequency = 0.0;
};

struct SourceConfig {
    /// "none", "constant" or "manufactured".
    std::string kind = "none";
    double value = 0.0;
    /// Polynomial u*(x) = sum coefficients[i] x^i; the source is chosen so
    /// that u* solves the equation.
    std::vector<double> coefficients;
};

struct BoundaryConfig {
    bool blowup = false;
    double value = 0.0;
};

struct ProblemConfig {
    GeometryConfig geometry;
    double a = 0.0;
    double p = 0.5;
    NonlinearityConfig f;
    PotentialConfig potential;
    SourceConfig source;
    /// Defaults to blow-up at lo and Dirichlet sqrt(2) at hi.
    std::vector<BoundaryConfig> boundary{{true, 0.0}, {false, 1.4142135623730951}};
};

struct VerifyConfig {
    /// 0 selects the default fit window.
    double d_min = 0.0;
    double d_max = 0.0;
    /// Accepted relative error of the fitted rate.
    double rate_tolerance = 0.02;
    /// Accepted sup error against a manufactured solution.
    double manufactured_tolerance = 1e-5;
    /// Optional property suites run by verify-rate; 0 disables them.
    int comparison_trials = 0;
    int uniqueness_inits = 0;
    std::uint64_t seed = 20240601;
    unsigned threads = 0;
    /// ko-check: expected classification ("holds" or "fails"); empty accepts either.
    std::string expect_ko;
};

struct SweepConfig {
    std::vector<double> a_values{-1.0, 0.0, 1.0};
    double spread_tolerance = 0.02;
};

struct ProfileConfig {
    double t_lo = 1e-4;
    double t_hi = 0.1;
    int per_decade = 16;
};

struct MixedConfig {
    double eps0 = 0.0;
    int max_domains = 40;
    double shrink_tol = 1e-5;
    /// Accepted relative gap between the minimal and maximal solutions on the core.
    double core_tolerance = 1e-3;
};

struct ExperimentConfig {
    Mode mode = Mode::solve;
    ProblemConfig problem;
    GridOptions grid;
    /// "schedule" or "asymptotic".
    std::string blowup_mode = "schedule";
    ScheduleMode schedule;
    /// Offset for the asymptotic mode; 0 selects the default.
    double delta = 0.0;
    NewtonOptions newton;
    VerifyConfig verify;
    SweepConfig sweep;
    ProfileConfig profile;
    MixedConfig mixed;
    /// Empty selects $BLOWUP_OUT_DIR, then "blowup_out".
    std::string output_dir;
};

/// Throws ConfigError("<path>: <reason>") on any schema violation.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every field, pretty-printed; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& config);

/// Builds the problem and checks it; ConfigError names the offending key.
ProblemSpec make_spec(const ProblemConfig& config);

/// u*(x) for a manufactured source; empty otherwise.
std::optional<double> manufactured_value(const ProblemConfig& config, double x);

}  // namespace blowup
