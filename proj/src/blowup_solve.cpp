#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blowup/asymptotics.hpp"
#include "blowup/errors.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/solver.hpp"
#include "operator.hpp"

namespace blowup {

namespace {

struct Ends {
    bool blow_lo = false;
    bool blow_hi = false;
    double value_lo = 0.0;
    double value_hi = 0.0;
};

double dirichlet_value(const ProblemSpec& spec, int component) {
    if (const auto* dir = std::get_if<Dirichlet>(&spec.boundary.at(static_cast<std::size_t>(component)))) {
        return dir->value;
    }
    return 0.0;
}

Ends ends_from_spec(const ProblemSpec& spec) {
    Ends e;
    if (spec.geometry.kind == GeometryKind::ball) {
        e.blow_hi = spec.is_blowup(0);
        e.value_hi = dirichlet_value(spec, 0);
        return e;
    }
    e.blow_lo = spec.is_blowup(0);
    e.blow_hi = spec.is_blowup(1);
    e.value_lo = dirichlet_value(spec, 0);
    e.value_hi = dirichlet_value(spec, 1);
    return e;
}

void check_hypotheses(const ProblemSpec& spec) {
    if (!spec.f.satisfies_h1()) {
        throw InvalidFunctionError("f must be positive on (0, inf) with f(0) = 0");
    }
    const KoDiagnostic ko = keller_osserman(spec.f);
    if (ko.classification == KoClass::fails) {
        throw KellerOssermanError("f violates the Keller-Osserman condition; no large solution exists");
    }
    const H4Check h4 = check_h4(spec.f, spec.p, geometric_grid(1e-3, 1e6, 200));
    if (!h4.increasing) {
        std::ostringstream msg;
        msg << "f(u)/u^p must be increasing; fails between u = " << h4.violation->first << " and "
            << h4.violation->second;
        throw DomainError(msg.str());
    }
}

double core_of(const ProblemSpec& spec, double d_core) {
    return d_core > 0.0 ? d_core : core_distance(spec.geometry);
}

double relative_core_gap(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& d,
                         double d_core) {
    double diff = 0.0;
    double size = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (d[i] >= d_core) {
            diff = std::max(diff, std::abs(a[i] - b[i]));
            size = std::max(size, std::abs(a[i]));
        }
    }
    return size > 0.0 ? diff / size : diff;
}

DiscreteField run_schedule(const ProblemSpec& spec, const Grid& grid, const Ends& ends, const ScheduleMode& mode,
                           const NewtonOptions& newton, const std::optional<std::vector<double>>& u_init) {
    if (!(mode.m0 > 0.0) || !(mode.growth > 1.0) || mode.max_stages < 1) {
        throw DomainError("schedule: need m0 > 0, growth > 1 and max_stages >= 1");
    }
    detail::Operator op = detail::build_operator(spec, grid);
    const double d_core = core_of(spec, mode.d_core);
    if (std::none_of(op.d.begin(), op.d.end(), [&](double d) { return d >= d_core; })) {
        throw DomainError("schedule: core region d >= d_core contains no node");
    }
    std::vector<double> u;
    if (u_init) {
        if (u_init->size() != grid.size()) {
            throw DomainError("schedule: initial guess has the wrong size");
        }
        u = *u_init;
    } else {
        const double lo = ends.blow_lo ? mode.m0 : ends.value_lo;
        const double hi = ends.blow_hi ? mode.m0 : ends.value_hi;
        u.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double s = (grid[i] - grid[0]) / (grid[grid.size() - 1] - grid[0]);
            u[i] = op.origin ? hi : (1.0 - s) * lo + s * hi;
        }
    }
    std::vector<StageRecord> log;
    std::vector<std::vector<double>> stages;
    std::vector<double> gaps;
    std::vector<double> previous;
    detail::NewtonOutcome last{};
    bool stabilized = false;
    for (int j = 0; j < mode.max_stages; ++j) {
        const double m = mode.m0 * std::pow(mode.growth, j);
        if (!op.origin) {
            u.front() = ends.blow_lo ? m : ends.value_lo;
        }
        u.back() = ends.blow_hi ? m : ends.value_hi;
        const double shift = mode.lift_potential ? 1.0 / m : 0.0;
        try {
            last = detail::newton(spec, op, u, newton, shift);
        } catch (const NonConvergenceError& e) {
            std::ostringstream msg;
            msg << "schedule stage " << j << " (M = " << m << "): " << e.what();
            throw NonConvergenceError(msg.str(), e.trace());
        }
        double gap = 0.0;
        if (j > 0) {
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (u[i] < previous[i] - 1e-9 * std::max(1.0, std::abs(previous[i]))) {
                    std::ostringstream msg;
                    msg << "schedule: stage " << j << " decreased at x = " << grid[i] << " (" << previous[i]
                        << " -> " << u[i] << ")";
                    throw NumericError(msg.str());
                }
            }
            gap = relative_core_gap(u, previous, op.d, d_core);
            gaps.push_back(gap);
        }
        log.push_back(StageRecord{j, m, gap, last.iterations});
        if (mode.keep_stages) {
            stages.push_back(u);
        }
        previous = u;
        if (j > 0 && gap < mode.tol_interior && j + 1 >= mode.min_stages) {
            stabilized = true;
            break;
        }
    }
    if (!stabilized && mode.require_stabilization) {
        throw NonConvergenceError("schedule exhausted without interior stabilization", gaps);
    }
    DiscreteField field = detail::make_field(grid, std::move(u), op);
    field.residual_norm = last.residual;
    int total = 0;
    for (const StageRecord& r : log) {
        total += r.newton_iterations;
    }
    field.iterations = total;
    field.schedule_log = std::move(log);
    field.stage_values = std::move(stages);
    return field;
}

DiscreteField run_asymptotic(const ProblemSpec& spec, const Grid& grid, const Ends& ends, const AsymptoticBcMode& mode,
                             const NewtonOptions& newton) {
    const std::size_t n = grid.size();
    const double first_lo = grid.spacing(0);
    const double first_hi = grid.spacing(n - 2);
    double first = std::numeric_limits<double>::infinity();
    if (ends.blow_lo) {
        first = std::min(first, first_lo);
    }
    if (ends.blow_hi) {
        first = std::min(first, first_hi);
    }
    const double delta = mode.delta > 0.0 ? mode.delta : 20.0 * first;
    if ((ends.blow_lo && delta < 2.0 * first_lo) || (ends.blow_hi && delta < 2.0 * first_hi)) {
        throw ResolutionError("asymptotic_bc: delta is below two grid cells");
    }
    const BlowupProfile profile(spec.f, spec.potential.k, spec.potential.c);
    std::size_t lo = 0;
    std::size_t hi = n - 1;
    if (ends.blow_lo) {
        while (lo < n - 1 && grid[lo] - grid[0] < delta) {
            ++lo;
        }
    }
    if (ends.blow_hi) {
        while (hi > 0 && grid[n - 1] - grid[hi] < delta) {
            --hi;
        }
    }
    if (hi < lo + 9) {
        throw ResolutionError("asymptotic_bc: truncated domain keeps fewer than 8 interior nodes");
    }
    const Grid inner = grid.slice(lo, hi);
    const detail::Operator op = detail::build_operator(spec, inner);
    const double xi = profile.xi0();
    auto asymptotic = [&](double d) {
        return d > 0.0 ? xi * compute_h(profile, d) : std::numeric_limits<double>::infinity();
    };
    const double lo_value = ends.blow_lo ? asymptotic(grid[lo] - grid[0]) : ends.value_lo;
    const double hi_value = ends.blow_hi ? asymptotic(grid[n - 1] - grid[hi]) : ends.value_hi;
    std::vector<double> u(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) {
        const double s = (inner[i] - inner[0]) / (inner[inner.size() - 1] - inner[0]);
        u[i] = op.origin ? hi_value : (1.0 - s) * lo_value + s * hi_value;
    }
    if (!op.origin) {
        u.front() = lo_value;
    }
    u.back() = hi_value;
    const detail::NewtonOutcome outcome = detail::newton(spec, op, u, newton, 0.0);

    const detail::Operator full = detail::build_operator(spec, grid);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= lo && i <= hi) {
            values[i] = u[i - lo];
        } else {
            values[i] = asymptotic(full.d[i]);
        }
    }
    DiscreteField field = detail::make_field(grid, std::move(values), full);
    field.residual_norm = outcome.residual;
    field.iterations = outcome.iterations;
    return field;
}

}  // namespace

DiscreteField solve_blowup(const ProblemSpec& spec, const Grid& grid, const BlowupMode& mode,
                           const NewtonOptions& newton, const std::optional<std::vector<double>>& u_init) {
    validate(spec);
    if (!spec.has_blowup()) {
        throw DomainError("solve_blowup: no boundary component is marked blowup");
    }
    check_hypotheses(spec);
    const Ends ends = ends_from_spec(spec);
    if (const auto* schedule = std::get_if<ScheduleMode>(&mode)) {
        return run_schedule(spec, grid, ends, *schedule, newton, u_init);
    }
    return run_asymptotic(spec, grid, ends, std::get<AsymptoticBcMode>(mode), newton);
}

MixedResult solve_mixed(const ProblemSpec& spec, const Grid& grid, const MixedOptions& options,
                        const NewtonOptions& newton) {
    validate(spec);
    if (spec.geometry.kind != GeometryKind::annulus || !spec.is_blowup(0) || spec.is_blowup(1) ||
        dirichlet_value(spec, 1) != 0.0) {
        throw DomainError("solve_mixed: needs an annulus with blowup inside and Dirichlet 0 outside");
    }
    check_hypotheses(spec);
    const Ends ends = ends_from_spec(spec);
    const double d_core = core_of(spec, options.schedule.d_core);
    DiscreteField minimal = run_schedule(spec, grid, ends, options.schedule, newton, std::nullopt);

    const double r0 = spec.geometry.lo;
    const double r1 = spec.geometry.hi;
    const double eps0 = options.eps0 > 0.0 ? options.eps0 : 0.5 * d_core;
    if (!(eps0 < d_core)) {
        throw DomainError("solve_mixed: eps0 must be smaller than d_core");
    }
    const double first = options.grid.first_cell > 0.0 ? options.grid.first_cell : d_core / 1e5;
    auto gap_on_core = [&](const DiscreteField& coarse, const DiscreteField& fine) {
        double diff = 0.0;
        double size = 0.0;
        for (std::size_t i = 0; i < fine.values.size(); ++i) {
            if (fine.distance[i] >= d_core) {
                const double other = interpolate(coarse, fine.grid[i]);
                diff = std::max(diff, std::abs(fine.values[i] - other));
                size = std::max(size, std::abs(other));
            }
        }
        return size > 0.0 ? diff / size : diff;
    };

    std::vector<double> eps_trace;
    std::vector<double> gaps;
    std::optional<DiscreteField> maximal;
    for (int j = 0; j < options.max_domains; ++j) {
        const double eps = eps0 * std::ldexp(1.0, -j);
        const Grid sub = Grid::graded(r0 + eps, r1, options.grid.n_cells, first, options.grid.ratio, true, false);
        Ends sub_ends = ends;
        sub_ends.blow_lo = true;
        ScheduleMode sub_mode = options.schedule;
        sub_mode.d_core = d_core + eps;
        DiscreteField field = run_schedule(spec, sub, sub_ends, sub_mode, newton, std::nullopt);
        eps_trace.push_back(eps);
        if (maximal) {
            const double gap = gap_on_core(*maximal, field);
            gaps.push_back(gap);
            maximal = std::move(field);
            if (gap < options.tol) {
                break;
            }
        } else {
            maximal = std::move(field);
        }
    }
    MixedResult result{std::move(minimal), std::move(*maximal), 0.0, true, std::move(eps_trace), std::move(gaps)};
    for (std::size_t i = 0; i < result.maximal.values.size(); ++i) {
        const double lo = interpolate(result.minimal, result.maximal.grid[i]);
        const double hi = result.maximal.values[i];
        if (lo > hi + 1e-7 * std::max(1.0, std::abs(hi))) {
            result.ordered = false;
        }
    }
    result.core_gap = gap_on_core(result.minimal, result.maximal);
    return result;
}

double interpolate(const DiscreteField& field, double x) {
    const std::vector<double>& nodes = field.grid.nodes();
    const std::size_t n = nodes.size();
    if (!(x >= nodes.front() && x <= nodes.back())) {
        throw DomainError("interpolate: x outside the grid");
    }
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t k = static_cast<std::size_t>(it - nodes.begin());
    k = std::clamp<std::size_t>(k, 2, n - 2);
    const std::size_t start = k - 2;
    double value = 0.0;
    for (std::size_t a = start; a < start + 4; ++a) {
        double weight = 1.0;
        for (std::size_t b = start; b < start + 4; ++b) {
            if (b != a) {
                weight *= (x - nodes[b]) / (nodes[a] - nodes[b]);
            }
        }
        value += weight * field.values[a];
    }
    return value;
}

ProblemSpec majorant_spec(const ProblemSpec& spec, const Grid& grid) {
    validate(spec);
    double b_min = std::numeric_limits<double>::infinity();
    double r_max = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double x = grid[i];
        b_min = std::min(b_min, spec.b(distance_to_boundary(spec, x)));
        r_max = std::max(r_max, spec.r(x));
    }
    if (!(b_min > 0.0)) {
        throw DomainError("constant_majorant: b must be positive at every interior node");
    }
    ProblemSpec out = spec;
    out.a = std::abs(spec.a);
    out.potential = Potential{b_min, KWeight::power(0.0), {}};
    const double forcing = r_max + 1.0;
    out.source = [forcing](double) { return forcing; };
    return out;
}

DiscreteField constant_majorant(const ProblemSpec& spec, const Grid& grid, const ScheduleMode& schedule,
                                const NewtonOptions& newton) {
    const ProblemSpec major = majorant_spec(spec, grid);
    return solve_blowup(major, grid, schedule, newton);
}

}  // namespace blowup
