#include "blowup/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <locale>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "blowup/errors.hpp"
#include "blowup/limits.hpp"

namespace blowup {

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
    unsigned n = requested > 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, count) on a small pool; each job owns its outputs.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
    const unsigned n = worker_count(threads, count);
    if (n <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                job(i);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    return std::mt19937_64(seq);
}

struct WeightedFit {
    double intercept = 0.0;
    double rss = 0.0;
    bool ok = false;
};

WeightedFit fit_constant(const std::vector<double>& y, const std::vector<double>& w) {
    double sw = 0.0;
    double swy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sw += w[i];
        swy += w[i] * y[i];
    }
    WeightedFit fit;
    fit.intercept = swy / sw;
    for (std::size_t i = 0; i < y.size(); ++i) {
        fit.rss += w[i] * (y[i] - fit.intercept) * (y[i] - fit.intercept);
    }
    fit.ok = std::isfinite(fit.intercept);
    return fit;
}

WeightedFit fit_line(const std::vector<double>& g, const std::vector<double>& y, const std::vector<double>& w) {
    double sw = 0.0;
    double sg = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sw += w[i];
        sg += w[i] * g[i];
        sy += w[i] * y[i];
    }
    const double gm = sg / sw;
    const double ym = sy / sw;
    double sgg = 0.0;
    double sgy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sgg += w[i] * (g[i] - gm) * (g[i] - gm);
        sgy += w[i] * (g[i] - gm) * (y[i] - ym);
    }
    WeightedFit fit;
    if (!(sgg > 1e-14 * sw)) {
        return fit;
    }
    const double slope = sgy / sgg;
    fit.intercept = ym - slope * gm;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - fit.intercept - slope * g[i];
        fit.rss += w[i] * e * e;
    }
    fit.ok = std::isfinite(fit.intercept);
    return fit;
}

double richardson_innermost(const std::vector<double>& d, const std::vector<double>& y) {
    const std::size_t k = std::min<std::size_t>(3, d.size());
    return limits::extrapolate_to_zero(std::span(d).first(k), std::span(y).first(k), static_cast<int>(k) - 1);
}

}  // namespace

BlowupProfile profile_for(const ProblemSpec& spec) {
    return BlowupProfile(spec.f, spec.potential.k, spec.potential.c);
}

RateReport fit_boundary_rate(const DiscreteField& field, const BlowupProfile& profile, const RateWindow& window) {
    const std::size_t n = field.values.size();
    const Grid& grid = field.grid;
    const double extent = grid[n - 1] - grid[0];
    const double d_max = window.d_max > 0.0 ? window.d_max : 0.1 * extent;
    const double d_min = window.d_min > 0.0 ? window.d_min : std::max(200.0 * grid.min_spacing(), d_max / 50.0);
    if (!(d_min < d_max)) {
        throw DomainError("fit_boundary_rate: need d_min < d_max");
    }
    // The two nodes nearest each boundary point are never used.
    std::vector<double> positive;
    for (double d : field.distance) {
        if (d > 0.0) {
            positive.push_back(d);
        }
    }
    std::sort(positive.begin(), positive.end());
    positive.erase(std::unique(positive.begin(), positive.end()), positive.end());
    const double excluded = positive.size() > 1 ? positive[1] : 0.0;

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = field.distance[i];
        if (d > excluded && d >= d_min && d <= d_max && std::isfinite(field.values[i])) {
            idx.push_back(i);
        }
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return field.distance[a] < field.distance[b]; });
    if (idx.size() < 8) {
        std::ostringstream msg;
        msg << "fit_boundary_rate: window [" << d_min << ", " << d_max << "] holds " << idx.size()
            << " usable nodes; need 8";
        throw ResolutionError(msg.str());
    }

    RateReport report;
    report.target_xi0 = profile.xi0();
    std::vector<double> d(idx.size());
    std::vector<double> ratio(idx.size());
    std::vector<double> h(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        d[k] = field.distance[idx[k]];
        h[k] = compute_h(profile, d[k]);
        ratio[k] = field.values[idx[k]] / h[k];
        report.pointwise_ratios.emplace_back(d[k], ratio[k]);
    }
    report.window = {d.front(), d.back()};

    // Weights proportional to the log-spacing of the nodes, so that the
    // uniform part of a graded grid does not dominate.
    std::vector<double> w(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double left = std::log(d[k > 0 ? k - 1 : k]);
        const double right = std::log(d[k + 1 < d.size() ? k + 1 : k]);
        w[k] = std::max(0.5 * (right - left), 1e-12);
    }

    const WeightedFit constant = fit_constant(ratio, w);
    WeightedFit best;
    double best_tau = 0.0;
    for (double tau = 0.5; tau <= 4.0 + 1e-12; tau += 0.25) {
        std::vector<double> g(d.size());
        const double g_ref = std::pow(h.back(), -tau);
        for (std::size_t k = 0; k < d.size(); ++k) {
            g[k] = std::pow(h[k], -tau) / g_ref;
        }
        const WeightedFit fit = fit_line(g, ratio, w);
        if (fit.ok && (!best.ok || fit.rss < best.rss)) {
            best = fit;
            best_tau = tau;
        }
    }
    if (best.ok && best.rss * 4.0 < constant.rss) {
        report.fitted_xi = best.intercept;
        report.estimator = "power-regression";
        report.tau = best_tau;
    } else if (constant.ok) {
        report.fitted_xi = constant.intercept;
        report.estimator = "mean";
    }
    if (!std::isfinite(report.fitted_xi) || !(report.fitted_xi > 0.0)) {
        report.fitted_xi = richardson_innermost(d, ratio);
        report.estimator = "richardson";
        report.tau.reset();
    }
    report.relative_error = std::abs(report.fitted_xi - report.target_xi0) / report.target_xi0;

    std::vector<double> ld;
    std::vector<double> le;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double e = std::abs(ratio[k] - report.target_xi0);
        if (e > 0.0) {
            ld.push_back(std::log(d[k]));
            le.push_back(std::log(e));
        }
    }
    if (ld.size() >= 3) {
        const std::vector<double> coef = limits::polyfit(ld, le, 1);
        report.correction_decay = coef[1];
    }

    const double tol = 1e-3 * std::abs(report.fitted_xi);
    double run_max = ratio.front();
    double run_min = ratio.front();
    bool up = true;
    bool down = true;
    for (double r : ratio) {
        up = up && r >= run_max - tol;
        down = down && r <= run_min + tol;
        run_max = std::max(run_max, r);
        run_min = std::min(run_min, r);
    }
    report.non_monotone_warning = !(up || down);
    return report;
}

void write_rate_csv(std::ostream& out, const RateReport& report) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    buf << "d,ratio\n";
    for (const auto& [d, r] : report.pointwise_ratios) {
        buf << d << ',' << r << '\n';
    }
    out << buf.str();
}

ComparisonReport comparison_suite(const ProblemSpec& spec, const Grid& grid, int trials, const SuiteOptions& options,
                                  double tol) {
    validate(spec);
    if (spec.has_blowup()) {
        throw DomainError("comparison_suite: spec must be all-Dirichlet");
    }
    if (trials < 1) {
        throw DomainError("comparison_suite: need at least one trial");
    }
    const auto components = static_cast<std::size_t>(spec.geometry.boundary_components());
    struct Outcome {
        bool done = false;
        std::string skipped;
        std::optional<Counterexample> counterexample;
        double violation = -std::numeric_limits<double>::infinity();
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(trials));
    parallel_for(outcomes.size(), options.threads, [&](std::size_t t) {
        std::mt19937_64 rng = trial_rng(options.seed, t);
        std::uniform_real_distribution<double> base(0.5, 10.0);
        std::uniform_real_distribution<double> gap(0.0, 5.0);
        std::uniform_real_distribution<double> amp(0.0, 2.0);
        std::uniform_real_distribution<double> freq(1.0, 10.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const bool equal = unit(rng) < 0.1;
        std::vector<double> low(components);
        std::vector<double> high(components);
        for (std::size_t k = 0; k < components; ++k) {
            low[k] = base(rng);
            high[k] = equal ? low[k] : low[k] + gap(rng);
        }
        const double a_low = amp(rng);
        const double a_gap = equal ? 0.0 : amp(rng);
        const double w1 = freq(rng);
        const double w2 = freq(rng);
        ProblemSpec spec_low = spec;
        ProblemSpec spec_high = spec;
        const auto base_source = spec.source;
        spec_low.source = [=](double x) {
            const double s = std::sin(w1 * x);
            return (base_source ? base_source(x) : 0.0) + a_low * (1.0 + s * s);
        };
        spec_high.source = [=](double x) {
            const double s = std::sin(w1 * x);
            const double c = std::cos(w2 * x);
            return (base_source ? base_source(x) : 0.0) + a_low * (1.0 + s * s) + a_gap * (1.0 + c * c);
        };
        Outcome& out = outcomes[t];
        try {
            const DiscreteField u_low = solve_dirichlet(spec_low, grid, low, std::nullopt, options.newton);
            const DiscreteField u_high = solve_dirichlet(spec_high, grid, high, std::nullopt, options.newton);
            out.done = true;
            double worst = -std::numeric_limits<double>::infinity();
            std::size_t at = 0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double v = u_low.values[i] - u_high.values[i];
                const double scaled = v / std::max(1.0, std::abs(u_high.values[i]));
                if (scaled > worst) {
                    worst = scaled;
                    at = i;
                }
            }
            out.violation = worst;
            if (worst > tol) {
                out.counterexample =
                    Counterexample{static_cast<int>(t), high, low, worst, grid[at], u_high.values, u_low.values};
            }
        } catch (const Error& e) {
            out.skipped = "trial " + std::to_string(t) + ": " + e.what();
        }
    });
    ComparisonReport report;
    report.trials = trials;
    report.worst_violation = -std::numeric_limits<double>::infinity();
    for (Outcome& out : outcomes) {
        if (!out.done) {
            report.skipped.push_back(out.skipped);
            continue;
        }
        ++report.completed;
        report.worst_violation = std::max(report.worst_violation, out.violation);
        if (out.counterexample) {
            report.counterexamples.push_back(std::move(*out.counterexample));
        }
    }
    report.passed = report.completed > 0 && report.counterexamples.empty();
    return report;
}

UniquenessReport uniqueness_check(const ProblemSpec& spec, const Grid& grid, int n_inits, const SuiteOptions& options,
                                  const ScheduleMode& schedule) {
    if (n_inits < 1) {
        throw DomainError("uniqueness_check: need n_inits >= 1");
    }
    std::vector<std::optional<DiscreteField>> fields(static_cast<std::size_t>(n_inits));
    std::vector<std::string> errors(fields.size());
    parallel_for(fields.size(), options.threads, [&](std::size_t t) {
        std::mt19937_64 rng = trial_rng(options.seed, t);
        std::uniform_real_distribution<double> log_value(-2.0, 3.0);
        std::vector<double> init(grid.size());
        for (double& v : init) {
            v = std::exp(log_value(rng));
        }
        try {
            fields[t] = solve_blowup(spec, grid, schedule, options.newton, init);
        } catch (const Error& e) {
            errors[t] = "init " + std::to_string(t) + ": " + e.what();
        }
    });
    UniquenessReport report;
    const double d_core = schedule.d_core > 0.0 ? schedule.d_core : core_distance(spec.geometry);
    double size = 0.0;
    for (std::size_t a = 0; a < fields.size(); ++a) {
        if (!fields[a]) {
            report.failures.push_back(errors[a]);
            continue;
        }
        ++report.completed;
        for (std::size_t b = a + 1; b < fields.size(); ++b) {
            if (!fields[b]) {
                continue;
            }
            const auto& fa = *fields[a];
            const auto& fb = *fields[b];
            // Whole field when both runs ended at the same boundary value, core otherwise.
            const bool same_stage = fa.schedule_log->back().boundary_value == fb.schedule_log->back().boundary_value;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (!same_stage && fa.distance[i] < d_core) {
                    continue;
                }
                report.max_difference = std::max(report.max_difference, std::abs(fa.values[i] - fb.values[i]));
                size = std::max(size, std::abs(fa.values[i]));
            }
        }
    }
    report.relative_difference = size > 0.0 ? report.max_difference / size : report.max_difference;
    return report;
}

SweepReport sweep_a(const ProblemSpec& spec_template, const std::vector<double>& a_values, const Grid& grid,
                    const SweepOptions& options) {
    if (a_values.empty()) {
        throw DomainError("sweep_a: no a values");
    }
    for (double a : a_values) {
        if (!std::isfinite(a)) {
            throw DomainError("sweep_a: a values must be finite");
        }
    }
    const BlowupProfile profile = profile_for(spec_template);
    SweepReport report;
    report.target_xi0 = profile.xi0();
    report.rows.resize(a_values.size());
    report.core_values.resize(a_values.size());
    const double d_core = core_distance(spec_template.geometry);
    parallel_for(a_values.size(), options.suite.threads, [&](std::size_t k) {
        SweepRow& row = report.rows[k];
        row.a = a_values[k];
        ProblemSpec spec = spec_template;
        spec.a = a_values[k];
        try {
            const DiscreteField field = solve_blowup(spec, grid, options.mode, options.suite.newton);
            const RateReport rate = fit_boundary_rate(field, profile, options.window);
            row.converged = true;
            row.fitted_xi = rate.fitted_xi;
            std::vector<double> core;
            for (std::size_t i = 0; i < field.values.size(); ++i) {
                if (field.distance[i] >= d_core) {
                    core.push_back(field.values[i]);
                    row.interior_norm = std::max(row.interior_norm, std::abs(field.values[i]));
                }
            }
            report.core_values[k] = std::move(core);
        } catch (const Error& e) {
            row.message = e.what();
        }
    });
    report.all_converged = std::all_of(report.rows.begin(), report.rows.end(), [](const SweepRow& r) { return r.converged; });
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    int count = 0;
    for (const SweepRow& r : report.rows) {
        if (r.converged) {
            lo = std::min(lo, r.fitted_xi);
            hi = std::max(hi, r.fitted_xi);
            sum += r.fitted_xi;
            ++count;
        }
    }
    report.xi_spread = count > 0 ? (hi - lo) / (sum / count) : 0.0;

    std::vector<std::size_t> order(report.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return report.rows[x].a < report.rows[y].a; });
    report.ordered_in_a = report.all_converged;
    for (std::size_t k = 1; k < order.size() && report.ordered_in_a; ++k) {
        const auto& below = report.core_values[order[k - 1]];
        const auto& above = report.core_values[order[k]];
        for (std::size_t i = 0; i < below.size(); ++i) {
            if (below[i] > above[i] + 1e-9 * std::max(1.0, std::abs(above[i]))) {
                report.ordered_in_a = false;
                break;
            }
        }
    }
    return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    buf << "a,converged,fitted_xi,interior_norm\n";
    for (const SweepRow& r : report.rows) {
        buf << r.a << ',' << (r.converged ? 1 : 0) << ',' << r.fitted_xi << ',' << r.interior_norm << '\n';
    }
    out << buf.str();
}

}  // namespace blowup
