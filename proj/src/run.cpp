#include "blowup/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "blowup/asymptotics.hpp"
#include "blowup/errors.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/verify.hpp"
#include "json.hpp"

#ifndef BLOWUP_VERSION
#define BLOWUP_VERSION "0.0.0"
#endif

namespace blowup {

namespace {

using nlohmann::json;

namespace fs = std::filesystem;

// Non-finite doubles become null in the report.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) {
        out.push_back(number(x));
    }
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    writer(out);
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

struct Context {
    const ExperimentConfig& config;
    fs::path dir;
    std::ostream& log;
    json results = json::object();
    json files = json::array();
    bool passed = true;

    template <class Writer>
    void emit(const std::string& name, Writer&& writer) {
        write_file(dir / name, std::forward<Writer>(writer));
        files.push_back(name);
    }

    void check(const std::string& name, bool ok) {
        results["checks"][name] = ok;
        if (!ok) {
            passed = false;
            log << "check failed: " << name << '\n';
        }
    }
};

BlowupMode blowup_mode(const ExperimentConfig& c) {
    if (c.blowup_mode == "asymptotic") {
        return AsymptoticBcMode{c.delta};
    }
    return c.schedule;
}

RateWindow rate_window(const ExperimentConfig& c) { return RateWindow{c.verify.d_min, c.verify.d_max}; }

SuiteOptions suite_options(const ExperimentConfig& c) {
    SuiteOptions s;
    s.seed = c.verify.seed;
    s.threads = c.verify.threads;
    s.newton = c.newton;
    return s;
}

json field_summary(const DiscreteField& field) {
    json j = {{"nodes", field.values.size()},
              {"residual_norm", number(field.residual_norm)},
              {"newton_iterations", field.iterations}};
    if (field.schedule_log && !field.schedule_log->empty()) {
        j["stages"] = field.schedule_log->size();
        j["final_boundary_value"] = number(field.schedule_log->back().boundary_value);
        j["final_core_gap"] = number(field.schedule_log->back().core_gap);
    }
    return j;
}

json rate_summary(const RateReport& r) {
    json j = {{"fitted_xi", number(r.fitted_xi)},
              {"target_xi0", number(r.target_xi0)},
              {"relative_error", number(r.relative_error)},
              {"window", {number(r.window.first), number(r.window.second)}},
              {"estimator", r.estimator},
              {"window_nodes", r.pointwise_ratios.size()},
              {"non_monotone_warning", r.non_monotone_warning}};
    j["tau"] = r.tau ? number(*r.tau) : json(nullptr);
    j["correction_decay"] = r.correction_decay ? number(*r.correction_decay) : json(nullptr);
    return j;
}

void write_field_files(Context& ctx, const DiscreteField& field, const std::string& name) {
    ctx.emit(name, [&](std::ostream& out) { write_field(out, field); });
    if (field.schedule_log) {
        const std::string stem = name.substr(0, name.find('.'));
        const std::string log_name = stem == "field" ? "schedule.csv" : stem + "_schedule.csv";
        ctx.emit(log_name, [&](std::ostream& out) { write_schedule(out, *field.schedule_log); });
    }
}

DiscreteField solve_any(const ProblemSpec& spec, const Grid& grid, const ExperimentConfig& c) {
    if (spec.has_blowup()) {
        return solve_blowup(spec, grid, blowup_mode(c), c.newton);
    }
    return solve_dirichlet(spec, grid, std::nullopt, std::nullopt, c.newton);
}

void run_profile(Context& ctx, const ProblemSpec& spec) {
    const ExperimentConfig& c = ctx.config;
    const BlowupProfile profile = profile_for(spec);
    const auto table = tabulate_profile(profile, c.profile.t_lo, c.profile.t_hi, c.profile.per_decade);
    ctx.emit("profile.dat", [&](std::ostream& out) { write_profile(out, table); });
    ctx.results["profile"] = {{"rho", number(profile.rho())},
                              {"ell1", number(profile.ell1())},
                              {"xi0", number(profile.xi0())},
                              {"t_max", number(profile.t_max())},
                              {"rows", table.size()},
                              {"h_at_t_hi", number(table.back().second)}};
}

void run_solve(Context& ctx, const ProblemSpec& spec) {
    const ExperimentConfig& c = ctx.config;
    const Grid grid = make_grid(spec, c.grid);
    const DiscreteField field = solve_any(spec, grid, c);
    write_field_files(ctx, field, "field.dat");
    ctx.results["solve"] = field_summary(field);
    if (c.problem.source.kind == "manufactured") {
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::abs(field.values[i] - *manufactured_value(c.problem, grid[i])));
        }
        ctx.results["solve"]["manufactured_error"] = number(err);
        ctx.check("manufactured_error", err <= c.verify.manufactured_tolerance);
    }
}

ProblemSpec dirichlet_version(const ProblemSpec& spec) {
    ProblemSpec out = spec;
    for (auto& bc : out.boundary) {
        if (std::holds_alternative<Blowup>(bc)) {
            bc = Dirichlet{0.0};
        }
    }
    return out;
}

void run_verify_rate(Context& ctx, const ProblemSpec& spec) {
    const ExperimentConfig& c = ctx.config;
    const Grid grid = make_grid(spec, c.grid);
    const DiscreteField field = solve_blowup(spec, grid, blowup_mode(c), c.newton);
    write_field_files(ctx, field, "field.dat");
    const RateReport rate = fit_boundary_rate(field, profile_for(spec), rate_window(c));
    ctx.emit("rates.csv", [&](std::ostream& out) { write_rate_csv(out, rate); });
    ctx.results["solve"] = field_summary(field);
    ctx.results["rate"] = rate_summary(rate);
    ctx.check("rate_within_tolerance", rate.relative_error <= c.verify.rate_tolerance);

    if (c.verify.comparison_trials > 0) {
        const ProblemSpec dir = dirichlet_version(spec);
        const Grid uniform = Grid::uniform(spec.geometry.lo, spec.geometry.hi, c.grid.n_cells);
        const ComparisonReport cmp = comparison_suite(dir, uniform, c.verify.comparison_trials, suite_options(c));
        ctx.results["comparison"] = {{"trials", cmp.trials},
                                     {"completed", cmp.completed},
                                     {"skipped", cmp.skipped},
                                     {"counterexamples", cmp.counterexamples.size()},
                                     {"worst_violation", number(cmp.worst_violation)}};
        ctx.check("comparison_principle", cmp.passed);
    }
    if (c.verify.uniqueness_inits > 0) {
        const UniquenessReport u = uniqueness_check(spec, grid, c.verify.uniqueness_inits, suite_options(c), c.schedule);
        ctx.results["uniqueness"] = {{"completed", u.completed},
                                     {"failures", u.failures},
                                     {"max_difference", number(u.max_difference)},
                                     {"relative_difference", number(u.relative_difference)}};
        ctx.check("uniqueness", u.failures.empty() && u.relative_difference < 1e-6);
    }
}

void run_sweep(Context& ctx, const ProblemSpec& spec) {
    const ExperimentConfig& c = ctx.config;
    const Grid grid = make_grid(spec, c.grid);
    SweepOptions options;
    options.mode = blowup_mode(c);
    options.window = rate_window(c);
    options.suite = suite_options(c);
    const SweepReport r = sweep_a(spec, c.sweep.a_values, grid, options);
    ctx.emit("sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, r); });
    json rows = json::array();
    for (const SweepRow& row : r.rows) {
        rows.push_back({{"a", number(row.a)},
                        {"converged", row.converged},
                        {"fitted_xi", number(row.fitted_xi)},
                        {"interior_norm", number(row.interior_norm)},
                        {"message", row.message}});
    }
    ctx.results["sweep"] = {{"rows", rows},
                            {"target_xi0", number(r.target_xi0)},
                            {"xi_spread", number(r.xi_spread)},
                            {"ordered_in_a", r.ordered_in_a}};
    ctx.check("all_converged", r.all_converged);
    ctx.check("xi_spread_within_tolerance", r.all_converged && r.xi_spread < c.sweep.spread_tolerance);
}

void run_ko_check(Context& ctx, const ProblemSpec& spec) {
    const KoDiagnostic ko = keller_osserman(spec.f);
    ctx.results["keller_osserman"] = {{"nonlinearity", spec.f.name()},
                                      {"classification", to_string(ko.classification)},
                                      {"rule", ko.rule},
                                      {"panel_sums", numbers(ko.panel_sums)}};
    ctx.results["keller_osserman"]["log_tail_exponent"] =
        ko.log_tail_exponent ? number(*ko.log_tail_exponent) : json(nullptr);
    ctx.log << "Keller-Osserman condition for " << spec.f.name() << ": " << to_string(ko.classification) << '\n';
    ctx.check("classified", ko.classification != KoClass::inconclusive);
    if (!ctx.config.verify.expect_ko.empty()) {
        ctx.check("matches_expectation", to_string(ko.classification) == ctx.config.verify.expect_ko);
    }
}

void run_mixed(Context& ctx, const ProblemSpec& spec) {
    const ExperimentConfig& c = ctx.config;
    const Grid grid = make_grid(spec, c.grid);
    MixedOptions options;
    options.schedule = c.schedule;
    options.grid = c.grid;
    options.eps0 = c.mixed.eps0;
    options.max_domains = c.mixed.max_domains;
    options.tol = c.mixed.shrink_tol;
    const MixedResult m = solve_mixed(spec, grid, options, c.newton);
    write_field_files(ctx, m.minimal, "field.dat");
    write_field_files(ctx, m.maximal, "field_maximal.dat");
    const RateReport rate = fit_boundary_rate(m.minimal, profile_for(spec), rate_window(c));
    ctx.emit("rates.csv", [&](std::ostream& out) { write_rate_csv(out, rate); });
    ctx.results["mixed"] = {{"core_gap", number(m.core_gap)},
                            {"ordered", m.ordered},
                            {"domains", m.eps_trace.size()},
                            {"eps_trace", numbers(m.eps_trace)},
                            {"shrink_gaps", numbers(m.shrink_gaps)},
                            {"minimal", field_summary(m.minimal)},
                            {"maximal", field_summary(m.maximal)}};
    ctx.results["rate"] = rate_summary(rate);
    ctx.check("minimal_below_maximal", m.ordered);
    ctx.check("minimal_equals_maximal_on_core", m.core_gap <= c.mixed.core_tolerance);
    ctx.check("rate_within_tolerance", rate.relative_error <= c.verify.rate_tolerance);
}

void check_mixed_layout(const ProblemConfig& p) {
    if (p.geometry.kind != GeometryKind::annulus) {
        throw ConfigError("problem.geometry.kind: mixed mode needs an annulus");
    }
    if (p.boundary.size() != 2 || !p.boundary[0].blowup || p.boundary[1].blowup || p.boundary[1].value != 0.0) {
        throw ConfigError("problem.boundary: mixed mode needs [blowup, dirichlet 0]");
    }
}

}  // namespace

fs::path resolve_output_dir(const ExperimentConfig& config) {
    if (!config.output_dir.empty()) {
        return config.output_dir;
    }
    if (const char* env = std::getenv("BLOWUP_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "blowup_out";
}

int run(const ExperimentConfig& config, std::ostream& log) {
    const auto started = std::chrono::steady_clock::now();
    const std::string timestamp = utc_timestamp();
    ProblemSpec spec;
    try {
        if (config.mode == Mode::mixed) {
            check_mixed_layout(config.problem);
        }
        spec = make_spec(config.problem);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    const fs::path dir = resolve_output_dir(config);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        log << "error: cannot create output directory " << dir.string() << ": " << ec.message() << '\n';
        return kExitFailure;
    }

    Context ctx{config, dir, log};
    json error = nullptr;
    try {
        switch (config.mode) {
            case Mode::profile:
                run_profile(ctx, spec);
                break;
            case Mode::solve:
                run_solve(ctx, spec);
                break;
            case Mode::verify_rate:
                run_verify_rate(ctx, spec);
                break;
            case Mode::sweep:
                run_sweep(ctx, spec);
                break;
            case Mode::ko_check:
                run_ko_check(ctx, spec);
                break;
            case Mode::mixed:
                run_mixed(ctx, spec);
                break;
        }
    } catch (const NonConvergenceError& e) {
        error = {{"type", "nonconvergence"}, {"message", e.what()}, {"trace", numbers(e.trace())}};
    } catch (const Error& e) {
        error = {{"type", "error"}, {"message", e.what()}};
    }
    if (!error.is_null()) {
        ctx.passed = false;
        log << "error: " << error["message"].get<std::string>() << '\n';
    }

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const int status = ctx.passed ? kExitPass : kExitFailure;
    const json report = {
        {"header", {{"generated_at", timestamp}, {"wall_seconds", seconds}}},
        {"tool", {{"name", "blowup"}, {"version", BLOWUP_VERSION}}},
        {"mode", to_string(config.mode)},
        {"config", json::parse(serialize_config(config))},
        {"results", ctx.results},
        {"error", error},
        {"files", ctx.files},
        {"passed", ctx.passed},
        {"exit_status", status},
    };
    try {
        write_file(dir / "report.json", [&](std::ostream& out) { out << report.dump(2) << '\n'; });
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    log << to_string(config.mode) << ": " << (ctx.passed ? "PASS" : "FAIL") << " (report: " << (dir / "report.json").string()
        << ")\n";
    return status;
}

}  // namespace blowup
