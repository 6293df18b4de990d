#include "blowup/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>

#include "blowup/asymptotics.hpp"
#include "blowup/errors.hpp"
#include "operator.hpp"

namespace blowup {

namespace detail {

Operator build_operator(const ProblemSpec& spec, const Grid& grid) {
    const std::size_t n = grid.size();
    Operator op;
    op.lower.assign(n, 0.0);
    op.diag.assign(n, 0.0);
    op.upper.assign(n, 0.0);
    op.b.resize(n);
    op.r.resize(n);
    op.d.resize(n);
    op.fixed.assign(n, 1);
    const int dim = spec.geometry.dimension;
    op.origin = spec.geometry.kind == GeometryKind::ball && grid[0] == 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid[i];
        op.d[i] = distance_to_boundary(spec, x);
        op.b[i] = spec.b(op.d[i]);
        op.r[i] = spec.r(x);
        if (!(op.b[i] >= 0.0) || !std::isfinite(op.b[i])) {
            std::ostringstream msg;
            msg << "b(x) must be finite and >= 0; b = " << op.b[i] << " at x = " << x;
            throw DomainError(msg.str());
        }
        if (!(op.r[i] >= 0.0) || !std::isfinite(op.r[i])) {
            std::ostringstream msg;
            msg << "source r(x) must be finite and >= 0; r = " << op.r[i] << " at x = " << x;
            throw DomainError(msg.str());
        }
    }
    if (op.origin) {
        const double h = grid.spacing(0);
        op.fixed[0] = 0;
        op.upper[0] = 2.0 * dim / (h * h);
        op.diag[0] = -op.upper[0];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = grid.spacing(i - 1);
        const double hp = grid.spacing(i);
        double wm = 1.0;
        double wp = 1.0;
        // Control-volume measure divided by x^(N-1); (hm + hp)/2 on the interval.
        double volume = 0.5 * (hm + hp);
        if (spec.geometry.kind != GeometryKind::interval && dim > 1) {
            const double x = grid[i];
            wm = std::pow((x - 0.5 * hm) / x, dim - 1);
            wp = std::pow((x + 0.5 * hp) / x, dim - 1);
            volume = (std::pow((x + 0.5 * hp) / x, dim) - std::pow((x - 0.5 * hm) / x, dim)) * x / dim;
        }
        op.fixed[i] = 0;
        op.lower[i] = wm / (hm * volume);
        op.upper[i] = wp / (hp * volume);
        op.diag[i] = -(op.lower[i] + op.upper[i]);
    }
    if (std::all_of(op.b.begin() + 1, op.b.end() - 1, [](double v) { return v == 0.0; })) {
        throw DomainError("b vanishes at every interior node");
    }
    return op;
}

double laplacian(const Operator& op, const std::vector<double>& u, std::size_t i) {
    double v = op.diag[i] * u[i];
    if (i > 0) {
        v += op.lower[i] * u[i - 1];
    }
    if (i + 1 < u.size()) {
        v += op.upper[i] * u[i + 1];
    }
    return v;
}

RowResidual row_residual(const ProblemSpec& spec, const Operator& op, const std::vector<double>& u,
                         std::size_t i, double b_shift) {
    const double lap = laplacian(op, u, i);
    const double up = std::pow(u[i], spec.p);
    const double bi = op.b[i] + b_shift;
    const double fu = spec.f(u[i]);
    RowResidual out;
    out.value = lap + spec.a * up - bi * fu + op.r[i];
    double scale = std::abs(op.diag[i] * u[i]) + std::abs(spec.a) * up + bi * std::abs(fu) + op.r[i];
    if (i > 0) {
        scale += std::abs(op.lower[i] * u[i - 1]);
    }
    if (i + 1 < u.size()) {
        scale += std::abs(op.upper[i] * u[i + 1]);
    }
    out.scale = scale;
    return out;
}

void thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
            std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    for (double v : rhs) {
        if (!std::isfinite(v)) {
            throw NumericError("tridiagonal solve produced a non-finite value (singular Jacobian)");
        }
    }
}

namespace {

struct Evaluation {
    std::vector<double> residual;
    double merit = 0.0;    // sum of (R_i / |diag_i|)^2
    double relative = 0.0; // max |R_i| / scale_i
};

Evaluation evaluate(const ProblemSpec& spec, const Operator& op, const std::vector<double>& u, double b_shift) {
    Evaluation ev;
    ev.residual.assign(u.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (op.fixed[i]) {
            continue;
        }
        const RowResidual row = row_residual(spec, op, u, i, b_shift);
        ev.residual[i] = row.value;
        const double scaled = row.value / std::abs(op.diag[i]);
        ev.merit += scaled * scaled;
        if (row.value != 0.0) {
            ev.relative = std::max(ev.relative, std::abs(row.value) / row.scale);
        }
    }
    if (!std::isfinite(ev.merit) || !std::isfinite(ev.relative)) {
        ev.merit = std::numeric_limits<double>::infinity();
        ev.relative = std::numeric_limits<double>::infinity();
    }
    return ev;
}

}  // namespace

NewtonOutcome newton(const ProblemSpec& spec, const Operator& op, std::vector<double>& u,
                     const NewtonOptions& opts, double b_shift) {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!op.fixed[i] && !(u[i] >= 0.0)) {
            u[i] = 0.0;
        }
    }
    Evaluation ev = evaluate(spec, op, u, b_shift);
    if (!std::isfinite(ev.merit)) {
        throw NumericError("Newton: initial residual is not finite");
    }
    std::vector<double> trace{ev.relative};
    std::vector<double> jl(n), jd(n), ju(n), step(n), trial(n);
    bool polished = false;
    for (int iter = 0; iter <= opts.max_iterations; ++iter) {
        const bool converged = ev.relative <= opts.tol;
        if (converged && polished) {
            return {iter, ev.relative};
        }
        if (iter == opts.max_iterations) {
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (op.fixed[i]) {
                jl[i] = 0.0;
                ju[i] = 0.0;
                jd[i] = 1.0;
                step[i] = 0.0;
                continue;
            }
            const double uf = std::max(u[i], opts.jacobian_floor);
            jl[i] = op.lower[i];
            ju[i] = op.upper[i];
            jd[i] = op.diag[i] + spec.a * spec.p * std::pow(uf, spec.p - 1.0) -
                    (op.b[i] + b_shift) * spec.f.derivative(u[i]);
            step[i] = -ev.residual[i];
        }
        thomas(jl, jd, ju, step);
        // Largest step keeping every free node at >= 1% of its current value.
        double alpha = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!op.fixed[i] && step[i] < 0.0) {
                alpha = std::min(alpha, 0.99 * u[i] / -step[i]);
            }
        }
        bool accepted = false;
        bool positivity_limited = alpha < 1.0;
        for (int halving = 0; halving <= opts.max_halvings; ++halving) {
            if (!(alpha > 0.0)) {
                break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = u[i] + alpha * step[i];
            }
            Evaluation tev = evaluate(spec, op, trial, b_shift);
            if (tev.merit < ev.merit || (converged && tev.relative <= opts.tol)) {
                u.swap(trial);
                ev = std::move(tev);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        trace.push_back(ev.relative);
        if (converged) {
            polished = true;
            continue;
        }
        if (!accepted) {
            if (ev.relative <= 100.0 * opts.tol) {
                return {iter + 1, ev.relative};  // roundoff floor
            }
            if (positivity_limited && !(alpha > 0.0)) {
                throw PositivityError("Newton: positivity could not be maintained by damping");
            }
            throw NonConvergenceError("Newton: no residual decrease after the maximum number of halvings", trace);
        }
    }
    throw NonConvergenceError("Newton: iteration limit reached", trace);
}

DiscreteField make_field(const Grid& grid, std::vector<double> values, const Operator& op) {
    DiscreteField field{grid, std::move(values), op.d, 0.0, 0, std::nullopt, {}};
    return field;
}

}  // namespace detail

using detail::Operator;

namespace {

std::vector<double> boundary_values(const ProblemSpec& spec, const std::optional<std::vector<double>>& phi) {
    const auto count = static_cast<std::size_t>(spec.geometry.boundary_components());
    if (phi) {
        if (phi->size() != count) {
            throw DomainError("boundary data: expected one value per boundary component");
        }
        for (double v : *phi) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw DomainError("boundary data must be finite and >= 0");
            }
        }
        return *phi;
    }
    std::vector<double> out(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        if (const auto* dir = std::get_if<Dirichlet>(&spec.boundary[i])) {
            out[i] = dir->value;
        }
    }
    return out;
}

// Writes boundary data into the fixed end nodes of a full-domain grid.
void apply_boundary(const ProblemSpec& spec, const Operator& op, const std::vector<double>& phi,
                    std::vector<double>& u) {
    if (spec.geometry.kind == GeometryKind::ball) {
        u.back() = phi[0];
        if (!op.origin) {
            u.front() = phi[0];
        }
        return;
    }
    u.front() = phi[0];
    u.back() = phi[1];
}

std::vector<double> interpolate_ends(const Grid& grid, double lo_value, double hi_value, bool origin) {
    std::vector<double> u(grid.size());
    const double lo = grid[0];
    const double hi = grid[grid.size() - 1];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = (grid[i] - lo) / (hi - lo);
        u[i] = origin ? hi_value : (1.0 - s) * lo_value + s * hi_value;
    }
    return u;
}

void check_size(const Grid& grid, const std::vector<double>& u, const char* what) {
    if (u.size() != grid.size()) {
        std::ostringstream msg;
        msg << what << ": expected " << grid.size() << " values, got " << u.size();
        throw DomainError(msg.str());
    }
}

}  // namespace

std::vector<double> assemble_residual(const ProblemSpec& spec, const Grid& grid, const std::vector<double>& u,
                                      const std::optional<std::vector<double>>& phi) {
    validate(spec);
    check_size(grid, u, "assemble_residual");
    const Operator op = detail::build_operator(spec, grid);
    std::vector<double> data = boundary_values(spec, phi);
    std::vector<double> target(u.size(), 0.0);
    apply_boundary(spec, op, data, target);
    std::vector<double> out(u.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (op.fixed[i]) {
            const bool blow = spec.has_blowup() && !phi &&
                              ((i == 0 && spec.geometry.kind != GeometryKind::ball && spec.is_blowup(0)) ||
                               (i + 1 == u.size() && spec.is_blowup(spec.geometry.boundary_components() - 1)));
            out[i] = blow ? 0.0 : u[i] - target[i];
            continue;
        }
        if (!(u[i] >= 0.0)) {
            std::ostringstream msg;
            msg << "assemble_residual: u must be nonnegative; u[" << i << "] = " << u[i] << " at x = " << grid[i];
            throw DomainError(msg.str());
        }
        out[i] = detail::row_residual(spec, op, u, i, 0.0).value;
    }
    return out;
}

DiscreteField solve_dirichlet(const ProblemSpec& spec, const Grid& grid, const std::optional<std::vector<double>>& phi,
                              const std::optional<std::vector<double>>& u_init, const NewtonOptions& options) {
    validate(spec);
    if (spec.has_blowup()) {
        throw DomainError("solve_dirichlet: every boundary component must be Dirichlet");
    }
    const Operator op = detail::build_operator(spec, grid);
    const std::vector<double> data = boundary_values(spec, phi);
    std::vector<double> u;
    if (u_init) {
        check_size(grid, *u_init, "solve_dirichlet initial guess");
        u = *u_init;
    } else {
        const double lo_value = spec.geometry.kind == GeometryKind::ball ? data[0] : data.front();
        u = interpolate_ends(grid, lo_value, data.back(), op.origin);
    }
    apply_boundary(spec, op, data, u);
    const detail::NewtonOutcome outcome = detail::newton(spec, op, u, options, 0.0);
    const bool forced = std::any_of(data.begin(), data.end(), [](double v) { return v > 0.0; }) ||
                        std::any_of(op.r.begin(), op.r.end(), [](double v) { return v > 0.0; });
    if (forced) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!op.fixed[i] && !(u[i] > 0.0)) {
                std::ostringstream msg;
                msg << "solve_dirichlet: converged field is not positive at x = " << grid[i];
                throw PositivityError(msg.str());
            }
        }
    }
    DiscreteField field = detail::make_field(grid, std::move(u), op);
    field.residual_norm = outcome.residual;
    field.iterations = outcome.iterations;
    return field;
}

MonotoneResult monotone_iteration(const ProblemSpec& spec, const Grid& grid, const std::vector<double>& sub,
                                  const std::vector<double>& super, const MonotoneOptions& options) {
    validate(spec);
    check_size(grid, sub, "monotone_iteration sub");
    check_size(grid, super, "monotone_iteration super");
    const Operator op = detail::build_operator(spec, grid);
    const std::size_t n = grid.size();
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sub[i] <= super[i]) || !(sub[i] >= 0.0)) {
            std::ostringstream msg;
            msg << "monotone_iteration: need 0 <= sub <= super; violated at x = " << grid[i];
            throw BracketError(msg.str());
        }
        scale = std::max(scale, std::abs(super[i]));
    }
    MonotoneResult result{detail::make_field(grid, super, op), 0.0, true, true, 0.0, {}};

    // Residual signs of the bracket (reported, not enforced).
    for (std::size_t i = 0; i < n; ++i) {
        if (op.fixed[i]) {
            continue;
        }
        const detail::RowResidual rs = detail::row_residual(spec, op, sub, i, 0.0);
        const detail::RowResidual rp = detail::row_residual(spec, op, super, i, 0.0);
        if (rs.value < -1e-10 * rs.scale) {
            result.sub_is_subsolution = false;
        }
        if (rp.value > 1e-10 * rp.scale) {
            result.super_is_supersolution = false;
        }
    }

    // lambda bounds the decreasing part of u -> a u^p - b f(u) on [sub, super].
    double lambda = 0.0;
    constexpr int kSamples = 17;
    for (std::size_t i = 0; i < n; ++i) {
        if (op.fixed[i]) {
            continue;
        }
        for (int s = 0; s < kSamples; ++s) {
            const double v = sub[i] + (super[i] - sub[i]) * s / (kSamples - 1.0);
            const double uf = std::max(v, 1e-12);
            const double slope = op.b[i] * spec.f.derivative(v) - spec.a * spec.p * std::pow(uf, spec.p - 1.0);
            lambda = std::max(lambda, slope);
        }
    }
    lambda *= options.safety;
    result.lambda = lambda;

    std::vector<double> lo(n), di(n), up(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (op.fixed[i]) {
            lo[i] = 0.0;
            up[i] = 0.0;
            di[i] = 1.0;
        } else {
            lo[i] = -op.lower[i];
            up[i] = -op.upper[i];
            di[i] = lambda - op.diag[i];
        }
    }
    std::vector<double>& u = result.field.values;
    const double tol = options.tol * scale;
    for (int k = 0; k < options.max_iterations; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = op.fixed[i] ? u[i]
                                 : lambda * u[i] + spec.a * std::pow(u[i], spec.p) - op.b[i] * spec.f(u[i]) + op.r[i];
        }
        detail::thomas(lo, di, up, rhs);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double delta = rhs[i] - u[i];
            change = std::max(change, std::abs(delta));
            result.max_increase = std::max(result.max_increase, delta);
            if (rhs[i] < sub[i] - 1e-12 * scale) {
                std::ostringstream msg;
                msg << "monotone_iteration: iterate fell below the sub-solution at x = " << grid[i];
                throw BracketError(msg.str());
            }
            if (delta > 1e-12 * scale) {
                std::ostringstream msg;
                msg << "monotone_iteration: iterate increased at x = " << grid[i] << " (lambda too small?)";
                throw BracketError(msg.str());
            }
        }
        u.swap(rhs);
        result.sup_changes.push_back(change);
        result.field.iterations = k + 1;
        if (change < tol) {
            double res = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!op.fixed[i]) {
                    const detail::RowResidual row = detail::row_residual(spec, op, u, i, 0.0);
                    if (row.value != 0.0) {
                        res = std::max(res, std::abs(row.value) / row.scale);
                    }
                }
            }
            result.field.residual_norm = res;
            return result;
        }
    }
    throw NonConvergenceError("monotone_iteration: iteration limit reached", result.sup_changes);
}

void write_field(std::ostream& out, const DiscreteField& field) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        buf << field.grid[i] << ' ' << field.distance[i] << ' ' << field.values[i] << '\n';
    }
    out << buf.str();
}

void write_schedule(std::ostream& out, const std::vector<StageRecord>& log) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    buf << "stage,boundary_value,core_gap,newton_iterations\n";
    for (const StageRecord& r : log) {
        buf << r.stage << ',' << r.boundary_value << ',' << r.core_gap << ',' << r.newton_iterations << '\n';
    }
    out << buf.str();
}

}  // namespace blowup
