#pragma once

// Finite-difference solvers for  Delta u + a u^p = b f(u) - r  in one space
// variable (interval, or radial for balls and annuli).
//
// The Laplacian is discretized in flux (control-volume) form,
//     (1/x^(N-1)) (x^(N-1) u')'  ~  (1/V) [ w+ (u+ - u)/h+ - w- (u - u-)/h- ],
// with w+- = (x_{i+-1/2}/x_i)^(N-1) and V = (x_{i+1/2}^N - x_{i-1/2}^N) / (N x_i^(N-1)),
// which is (h- + h+)/2 on the interval and makes the stencil exact for quadratics.
// At the centre of a ball the row becomes 2N (u_1 - u_0)/h^2. The resulting
// matrix is an M-matrix, so the discrete problem inherits the comparison principle.

#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "blowup/grid.hpp"
#include "blowup/problem.hpp"

namespace blowup {

struct StageRecord {
    int stage = 0;
    double boundary_value = 0.0;
    /// max |u_j - u_{j-1}| / max |u_j| over the core; 0 for the first stage.
    double core_gap = 0.0;
    int newton_iterations = 0;
};

struct DiscreteField {
    Grid grid;
    std::vector<double> values;
    /// d(x) at each node, measured in the original geometry.
    std::vector<double> distance;
    double residual_norm = 0.0;
    int iterations = 0;
    std::optional<std::vector<StageRecord>> schedule_log;
    /// Per-stage values, filled only when requested.
    std::vector<std::vector<double>> stage_values;
};

struct NewtonOptions {
    /// Converged when every row satisfies |R_i| <= tol * (sum of the magnitudes of its terms).
    double tol = 1e-10;
    int max_iterations = 200;
    int max_halvings = 40;
    /// Jacobian entries of u^p use max(u, floor).
    double jacobian_floor = 1e-12;
};

/// Residual of Delta_h u + a u^p - b f(u) + r at every node. Rows of
/// Dirichlet nodes hold u - phi; `phi` lists one value per boundary
/// component and defaults to the spec's Dirichlet data (blow-up rows read 0).
std::vector<double> assemble_residual(const ProblemSpec& spec, const Grid& grid, const std::vector<double>& u,
                                      const std::optional<std::vector<double>>& phi = std::nullopt);

/// Damped Newton with a tridiagonal Jacobian and a positivity-preserving
/// line search. `spec` must be all-Dirichlet; `phi` overrides its values.
DiscreteField solve_dirichlet(const ProblemSpec& spec, const Grid& grid,
                              const std::optional<std::vector<double>>& phi = std::nullopt,
                              const std::optional<std::vector<double>>& u_init = std::nullopt,
                              const NewtonOptions& options = {});

struct MonotoneOptions {
    double tol = 1e-10;
    int max_iterations = 200000;
    double safety = 1.1;
};

struct MonotoneResult {
    DiscreteField field;
    double lambda = 0.0;
    bool sub_is_subsolution = false;
    bool super_is_supersolution = false;
    /// Largest increase max(u_{k+1} - u_k) seen over all iterations.
    double max_increase = 0.0;
    std::vector<double> sup_changes;
};

/// u_{k+1} = (lambda I - Delta_h)^{-1} (lambda u_k + a u_k^p - b f(u_k) + r),
/// started from `super`. Boundary values are read from `super`.
MonotoneResult monotone_iteration(const ProblemSpec& spec, const Grid& grid, const std::vector<double>& sub,
                                  const std::vector<double>& super, const MonotoneOptions& options = {});

struct ScheduleMode {
    double m0 = 10.0;
    double growth = 2.0;
    int max_stages = 40;
    /// Stop once the relative core gap between stages drops below this.
    double tol_interior = 1e-6;
    /// Core region d >= d_core; 0 selects 10% of the coordinate extent.
    double d_core = 0.0;
    /// Run at least this many stages before testing the gap.
    int min_stages = 0;
    /// When false, an exhausted schedule returns its last stage instead of throwing.
    bool require_stabilization = true;
    bool keep_stages = false;
    /// Replace b by b + 1/M_j at stage j.
    bool lift_potential = false;
};

struct AsymptoticBcMode {
    /// Truncation offset from each blow-up component; 0 selects 20 first cells.
    double delta = 0.0;
};

using BlowupMode = std::variant<ScheduleMode, AsymptoticBcMode>;

/// Large solution with the blow-up components driven to +infinity, either by
/// the increasing boundary-data schedule or by the asymptotic condition
/// u = xi0 h(delta) at offset delta. In asymptotic mode the nodes closer than
/// delta to a blow-up component carry xi0 h(d) (+inf on the boundary itself).
DiscreteField solve_blowup(const ProblemSpec& spec, const Grid& grid, const BlowupMode& mode = ScheduleMode{},
                           const NewtonOptions& newton = {},
                           const std::optional<std::vector<double>>& u_init = std::nullopt);

struct MixedOptions {
    ScheduleMode schedule;
    /// Grid used for every shrinking annulus (graded toward its inner circle).
    GridOptions grid;
    /// First inner offset of the shrinking domains; 0 selects d_core / 2.
    double eps0 = 0.0;
    int max_domains = 40;
    /// Stop shrinking once successive maximal fields differ by less than this on the core.
    double tol = 1e-5;
};

struct MixedResult {
    DiscreteField minimal;
    /// Lives on its own grid over (R0 + eps, R1).
    DiscreteField maximal;
    /// max |maximal - minimal| / max |minimal| on the core, minimal interpolated to maximal's nodes.
    double core_gap = 0.0;
    /// minimal <= maximal (1e-7 relative) at every node of the maximal grid.
    bool ordered = false;
    std::vector<double> eps_trace;
    std::vector<double> shrink_gaps;
};

/// Minimal solution from the schedule on the whole annulus; maximal solution
/// as the limit of blow-up problems on the annuli d > eps_j, eps_j = eps0 2^-j.
MixedResult solve_mixed(const ProblemSpec& spec, const Grid& grid, const MixedOptions& options = {},
                        const NewtonOptions& newton = {});

/// Piecewise-cubic (four-point Lagrange) interpolation of a field at x.
double interpolate(const DiscreteField& field, double x);

/// Schedule solution of  Delta w + |a| w^p = b_min f(w) - r_max - 1  with the
/// same boundary data; b_min and r_max are taken over the interior nodes.
DiscreteField constant_majorant(const ProblemSpec& spec, const Grid& grid, const ScheduleMode& schedule = {},
                                const NewtonOptions& newton = {});

/// Spec of the constant-coefficient majorant problem.
ProblemSpec majorant_spec(const ProblemSpec& spec, const Grid& grid);

/// Three columns "x d u" per node, round-trip precision.
void write_field(std::ostream& out, const DiscreteField& field);

/// CSV "stage,boundary_value,core_gap,newton_iterations".
void write_schedule(std::ostream& out, const std::vector<StageRecord>& log);

}  // namespace blowup
