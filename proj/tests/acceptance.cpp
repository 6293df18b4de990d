#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "blowup/asymptotics.hpp"
#include "blowup/karamata.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/solver.hpp"
#include "blowup/verify.hpp"

using namespace blowup;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

ProblemSpec one_sided(double c = 1.0) {
    ProblemSpec spec;
    spec.f = Nonlinearity::power(3.0);
    spec.potential.c = c;
    spec.boundary = {Blowup{}, Dirichlet{std::sqrt(2.0 / c)}};
    return spec;
}

double closed_form_h(double q, double gamma, double t) {
    const double rhs = std::sqrt(2.0) * std::pow(t, gamma + 1.0) / (gamma + 1.0);
    return std::pow((q - 1.0) * rhs / (2.0 * std::sqrt(q + 1.0)), -2.0 / (q - 1.0));
}

Verdict profile_closed_form() {
    double worst = 0.0;
    for (double q : {2.0, 3.0, 4.0}) {
        for (double gamma : {0.0, 1.0, 2.0}) {
            const BlowupProfile profile(Nonlinearity::power(q), KWeight::power(gamma), 1.0);
            for (double t : geometric_grid(1e-4, 1e-1, 31)) {
                worst = std::max(worst, std::abs(compute_h(profile, t) / closed_form_h(q, gamma, t) - 1.0));
            }
        }
    }
    return {worst < 1e-8, fmt("max relative error %.2e over 9 profiles", worst)};
}

Verdict classical_rate() {
    const ProblemSpec spec = one_sided();
    const Grid grid = make_grid(spec);
    const DiscreteField u = solve_blowup(spec, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= 0.01 && grid[i] <= 0.1) {
            worst = std::max(worst, std::abs(u.values[i] * grid[i] / std::sqrt(2.0) - 1.0));
        }
    }
    const double xi = fit_boundary_rate(u, profile_for(spec)).fitted_xi;
    return {worst < 0.02 && std::abs(xi - 1.0) < 0.02,
            fmt("max |u x / sqrt2 - 1| = %.2e on [0.01, 0.1], fitted xi = %.5f", worst, xi)};
}

Verdict xi_scaling() {
    std::vector<double> xi;
    for (double c : {1.0, 4.0}) {
        const ProblemSpec spec = one_sided(c);
        xi.push_back(fit_boundary_rate(solve_blowup(spec, make_grid(spec)), profile_for(spec)).fitted_xi);
    }
    const double ratio = xi[1] / xi[0];
    return {std::abs(ratio / 0.5 - 1.0) < 0.03, fmt("xi(c=1) = %.5f, xi(c=4) = %.5f, ratio %.5f", xi[0], xi[1], ratio)};
}

Verdict rate_independent_of_a() {
    ProblemSpec spec = one_sided();
    spec.p = 0.5;
    const SweepReport r = sweep_a(spec, {-5.0, 0.0, 5.0}, make_grid(spec));
    return {r.all_converged && r.xi_spread < 0.02 && r.ordered_in_a,
            fmt("xi spread %.2e, core fields ordered in a: ", r.xi_spread) + (r.ordered_in_a ? "yes" : "no")};
}

Verdict existence_for_all_a() {
    ProblemSpec spec = one_sided();
    spec.p = 0.5;
    const SweepReport r = sweep_a(spec, {-10.0, -1.0, 0.0, 1.0, 10.0}, make_grid(spec));
    const auto ok = std::count_if(r.rows.begin(), r.rows.end(), [](const SweepRow& row) { return row.converged; });
    return {r.all_converged && r.rows.size() == 5, fmt("%.0f of 5 rows converged", static_cast<double>(ok))};
}

Verdict comparison_principle() {
    ProblemSpec spec;
    spec.f = Nonlinearity::power(2.0);
    spec.a = 1.0;
    spec.p = 0.5;
    spec.boundary = {Dirichlet{1.0}, Dirichlet{1.0}};
    const ComparisonReport r = comparison_suite(spec, Grid::uniform(0.0, 1.0, 200), 100);
    const bool ok = r.completed == 100 && r.counterexamples.empty() && r.worst_violation <= 1e-10;
    return {ok, fmt("%.0f trials, %.0f counterexamples, worst violation %.2e", r.completed,
                    static_cast<double>(r.counterexamples.size()), r.worst_violation)};
}

Verdict keller_osserman_classes() {
    const std::vector<std::pair<Nonlinearity, KoClass>> cases = {
        {Nonlinearity::power(2.0), KoClass::holds},      {Nonlinearity::exponential(), KoClass::holds},
        {Nonlinearity::power_log(1.5), KoClass::holds},  {Nonlinearity::log_power(3.0), KoClass::holds},
        {Nonlinearity::power(1.0), KoClass::fails},      {Nonlinearity::power(0.5), KoClass::fails}};
    int correct = 0;
    for (const auto& [f, expected] : cases) {
        correct += keller_osserman(f).classification == expected ? 1 : 0;
    }
    return {correct == 6, fmt("%.0f/6 classifications correct", correct)};
}

Verdict ell_one_limits() {
    double worst = 0.0;
    for (double gamma : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        worst = std::max(worst, std::abs(ell_limits(KWeight::power(gamma)).ell1 - 1.0 / (gamma + 1.0)));
    }
    const double flat = ell_limits(KWeight::exp_flat()).ell1;
    return {worst < 1e-6 && std::abs(flat) < 1e-3, fmt("power weights max error %.2e, exp(-1/t) gives %.2e", worst, flat)};
}

Verdict h_identities() {
    const BlowupProfile classical(Nonlinearity::power(3.0), KWeight::power(0.0), 1.0);
    const BlowupProfile profiles[] = {classical, BlowupProfile(Nonlinearity::power(2.0), KWeight::power(1.0), 1.0),
                                      BlowupProfile(Nonlinearity::power_log(2.0), KWeight::power(2.0), 3.0),
                                      BlowupProfile(Nonlinearity::power(3.0), KWeight::exp_flat(), 1.0)};
    double worst_fd = 0.0;
    for (const auto& profile : profiles) {
        for (double frac : {0.2, 0.1, 0.05, 0.01}) {
            const double t = frac * profile.k().nu();
            const double step = 1e-3 * t * std::min(1.0, 5.0 * t);
            const double hm = compute_h(profile, t - step);
            const double h0 = compute_h(profile, t);
            const double hp = compute_h(profile, t + step);
            const HDerivatives d = h_derivatives(profile, t);
            worst_fd = std::max(worst_fd, std::abs(d.first / ((hp - hm) / (2.0 * step)) - 1.0));
            worst_fd = std::max(worst_fd, std::abs(d.second / ((hp - 2.0 * h0 + hm) / (step * step)) - 1.0));
        }
    }
    std::vector<double> ts;
    for (int n = 3; n <= 12; ++n) {
        ts.push_back(std::ldexp(1.0, -n));
    }
    double worst_limit = 0.0;
    for (double xi : {1.0, 2.0}) {
        const double target = (2.0 + 2.0) / ((2.0 + 2.0) * std::pow(xi, 3.0));
        worst_limit = std::max(worst_limit, std::abs(verify_h_limit(classical, xi, ts).estimate / target - 1.0));
    }
    return {worst_fd < 1e-4 && worst_limit < 0.01,
            fmt("derivatives vs finite differences %.2e, h'' limit error %.2e", worst_fd, worst_limit)};
}

Verdict mixed_problem() {
    ProblemSpec spec;
    spec.geometry = Geometry::annulus(2, 1.0, 2.0);
    spec.boundary = {Blowup{}, Dirichlet{0.0}};
    const MixedResult m = solve_mixed(spec, make_grid(spec));
    const double xi = fit_boundary_rate(m.minimal, profile_for(spec)).fitted_xi;
    return {m.core_gap < 1e-3 && std::abs(xi - 1.0) < 0.02,
            fmt("minimal/maximal core gap %.2e, inner fitted xi %.5f", m.core_gap, xi)};
}

double order_error(const ProblemSpec& spec, int n_cells, const std::function<double(double)>& exact) {
    const Grid grid = Grid::uniform(spec.geometry.lo, spec.geometry.hi, n_cells);
    const DiscreteField u = solve_dirichlet(spec, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        err = std::max(err, std::abs(u.values[i] - exact(grid[i])));
    }
    return err;
}

Verdict discretization_order() {
    constexpr double pi = std::numbers::pi;
    ProblemSpec line;
    line.f = Nonlinearity::power(3.0);
    line.source = [](double x) {
        const double s = std::sin(pi * x);
        return std::pow(1.0 + s, 3) + pi * pi * s;
    };
    line.boundary = {Dirichlet{1.0}, Dirichlet{1.0}};
    const auto line_exact = [](double x) { return 1.0 + std::sin(pi * x); };

    ProblemSpec ball;
    ball.geometry = Geometry::ball(3, 1.0);
    ball.f = Nonlinearity::power(3.0);
    ball.source = [](double r) {
        const double w = 0.5 * pi;
        const double radial = r > 0.0 ? 2.0 * w * std::sin(w * r) / r : 2.0 * w * w;
        return std::pow(1.0 + std::cos(w * r), 3) + w * w * std::cos(w * r) + radial;
    };
    ball.boundary = {Dirichlet{1.0}};
    const auto ball_exact = [](double r) { return 1.0 + std::cos(0.5 * pi * r); };

    std::vector<double> orders;
    for (const auto& [spec, exact] : {std::pair{line, std::function<double(double)>(line_exact)},
                                      std::pair{ball, std::function<double(double)>(ball_exact)}}) {
        const double e1 = order_error(spec, 32, exact);
        const double e2 = order_error(spec, 64, exact);
        const double e3 = order_error(spec, 128, exact);
        orders.push_back(std::log2(e1 / e2));
        orders.push_back(std::log2(e2 / e3));
    }
    const bool ok = std::all_of(orders.begin(), orders.end(), [](double p) { return std::abs(p - 2.0) <= 0.2; });
    return {ok, fmt("interval orders %.3f %.3f, ", orders[0], orders[1]) +
                    fmt("ball orders %.3f %.3f", orders[2], orders[3])};
}

Verdict mode_cross_validation() {
    const ProblemSpec spec = one_sided();
    const Grid grid = make_grid(spec);
    const DiscreteField s = solve_blowup(spec, grid);
    const DiscreteField a = solve_blowup(spec, grid, AsymptoticBcMode{});
    double diff = 0.0;
    double size = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (s.distance[i] >= 0.1) {
            diff = std::max(diff, std::abs(s.values[i] - a.values[i]));
            size = std::max(size, std::abs(s.values[i]));
        }
    }
    return {diff / size < 1e-3, fmt("relative core difference %.2e", diff / size)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"profile closed form", profile_closed_form},
        {"classical rate constant", classical_rate},
        {"rate constant scaling with c", xi_scaling},
        {"rate independent of a", rate_independent_of_a},
        {"existence for every a", existence_for_all_a},
        {"comparison principle", comparison_principle},
        {"Keller-Osserman classifier", keller_osserman_classes},
        {"l1 limits", ell_one_limits},
        {"profile derivative identities", h_identities},
        {"mixed annulus problem", mixed_problem},
        {"discretization order", discretization_order},
        {"schedule vs asymptotic boundary condition", mode_cross_validation},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += v.pass ? 0 : 1;
        std::printf("%s %2d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", index, name.c_str(), v.detail.c_str(),
                    seconds);
    }
    std::printf("%d of %zu criteria pass\n", index - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
