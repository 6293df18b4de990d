#pragma once

// Numerical checks of the boundary rate u ~ xi0 h(d), the comparison
// principle, uniqueness, and the independence of the rate from a.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blowup/asymptotics.hpp"
#include "blowup/solver.hpp"

namespace blowup {

struct RateWindow {
    /// 0 selects the defaults: d_max = d_core, d_min = max(200 first cells, d_max / 50).
    double d_min = 0.0;
    double d_max = 0.0;
};

struct RateReport {
    double fitted_xi = 0.0;
    double target_xi0 = 0.0;
    double relative_error = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    std::vector<std::pair<double, double>> pointwise_ratios;  // (d, u/h(d))
    /// Slope of log|u/h - xi0| against log d; empty when undefined.
    std::optional<double> correction_decay;
    /// "mean", "power-regression" or "richardson".
    std::string estimator;
    /// Exponent of the h(d)^-tau correction when the regression was chosen.
    std::optional<double> tau;
    /// Ratios are not monotone in d beyond 1e-3 relative.
    bool non_monotone_warning = false;
};

/// Profile of the spec's (f, k, c).
BlowupProfile profile_for(const ProblemSpec& spec);

/// Fits lim u/h(d) as d -> 0 over the window, skipping the two nodes nearest
/// each blow-up boundary. Throws ResolutionError when fewer than 8 nodes remain.
RateReport fit_boundary_rate(const DiscreteField& field, const BlowupProfile& profile, const RateWindow& window = {});

/// CSV "d,ratio" with one row per window node.
void write_rate_csv(std::ostream& out, const RateReport& report);

struct SuiteOptions {
    std::uint64_t seed = 20240601;
    /// 0 selects the hardware concurrency.
    unsigned threads = 0;
    NewtonOptions newton;
};

struct Counterexample {
    int trial = 0;
    std::vector<double> phi_high;
    std::vector<double> phi_low;
    double violation = 0.0;
    double x = 0.0;
    std::vector<double> u_high;
    std::vector<double> u_low;
};

struct ComparisonReport {
    bool passed = false;
    int trials = 0;
    int completed = 0;
    std::vector<std::string> skipped;
    std::vector<Counterexample> counterexamples;
    /// Largest max(u_low - u_high) over completed trials.
    double worst_violation = 0.0;
};

/// Randomized ordered pairs (phi_high >= phi_low, r_high >= r_low); checks
/// u_high >= u_low - tol * max(1, |u|) at every node. Spec must be all-Dirichlet.
ComparisonReport comparison_suite(const ProblemSpec& spec, const Grid& grid, int trials, const SuiteOptions& options = {},
                                  double tol = 1e-10);

struct UniquenessReport {
    double max_difference = 0.0;
    /// max_difference divided by the largest |u| over the compared nodes.
    double relative_difference = 0.0;
    int completed = 0;
    std::vector<std::string> failures;
};

/// Schedule solves warm-started from n_inits random positive fields.
UniquenessReport uniqueness_check(const ProblemSpec& spec, const Grid& grid, int n_inits, const SuiteOptions& options = {},
                                  const ScheduleMode& schedule = {});

struct SweepRow {
    double a = 0.0;
    bool converged = false;
    double fitted_xi = 0.0;
    /// max |u| over the core region.
    double interior_norm = 0.0;
    std::string message;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    bool all_converged = false;
    /// (max - min) / mean of fitted_xi over converged rows.
    double xi_spread = 0.0;
    /// Core fields are nodewise nondecreasing in a.
    bool ordered_in_a = false;
    double target_xi0 = 0.0;
    /// Core fields per row (same order as rows), empty for failed rows.
    std::vector<std::vector<double>> core_values;
};

struct SweepOptions {
    BlowupMode mode = ScheduleMode{};
    RateWindow window;
    SuiteOptions suite;
};

SweepReport sweep_a(const ProblemSpec& spec_template, const std::vector<double>& a_values, const Grid& grid,
                    const SweepOptions& options = {});

/// CSV "a,converged,fitted_xi,interior_norm".
void write_sweep_csv(std::ostream& out, const SweepReport& report);

}  // namespace blowup
