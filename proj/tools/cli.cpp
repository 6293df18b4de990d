#include "cli.hpp"

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blowup/config.hpp"
#include "blowup/errors.hpp"
#include "blowup/run.hpp"

namespace blowup {

namespace {

struct Flags {
    std::string config;
    double a = 0.0;
    int grid_n = 0;
    std::string out;
    std::uint64_t seed = 0;
    std::string f;
};

struct Bound {
    CLI::App* app = nullptr;
    Mode mode = Mode::solve;
    CLI::Option* config = nullptr;
    CLI::Option* a = nullptr;
    CLI::Option* grid_n = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* f = nullptr;
};

template <class T>
std::string show(const T& v) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << v;
    return s.str();
}

template <class T>
void override_value(T& target, const T& value, const std::string& flag, const std::string& key, bool from_file,
                    std::ostream& err) {
    if (from_file && target != value) {
        err << "notice: " << flag << " " << show(value) << " overrides " << key << " = " << show(target)
            << " from the config\n";
    }
    target = value;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boundary blow-up solutions of  Delta u + a u^p = b(x) f(u) - r(x)", "blowup"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<Mode, std::string>> modes = {
        {Mode::profile, "tabulate the blow-up profile h(t)"},
        {Mode::solve, "solve the configured Dirichlet or blow-up problem"},
        {Mode::verify_rate, "solve and fit the boundary rate against xi0 h(d)"},
        {Mode::sweep, "solve for each a and compare the fitted rates"},
        {Mode::ko_check, "classify the Keller-Osserman condition for f"},
        {Mode::mixed, "minimal and maximal solutions of the annulus problem"},
    };
    std::vector<Bound> bound;
    for (const auto& [mode, help] : modes) {
        Bound b;
        b.mode = mode;
        b.app = app.add_subcommand(to_string(mode), help);
        b.config = b.app->add_option("--config", flags.config, "experiment config (JSON)");
        b.a = b.app->add_option("--a", flags.a, "coefficient a of the sublinear term");
        b.grid_n = b.app->add_option("--grid-n", flags.grid_n, "number of base grid cells");
        b.out = b.app->add_option("--out", flags.out, "output directory");
        b.seed = b.app->add_option("--seed", flags.seed, "seed for the randomized suites");
        b.f = b.app->add_option("--f", flags.f, "nonlinearity: linear, sqrt, exponential or family:parameter");
        bound.push_back(b);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitConfig;
    }

    const Bound* chosen = nullptr;
    for (const Bound& b : bound) {
        if (b.app->parsed()) {
            chosen = &b;
        }
    }
    if (chosen == nullptr) {
        err << "error: no subcommand given\n";
        return kExitConfig;
    }

    ExperimentConfig config;
    const bool from_file = chosen->config->count() > 0;
    try {
        if (from_file) {
            config = load_config(flags.config);
        }
        if (from_file && config.mode != chosen->mode) {
            err << "notice: subcommand " << to_string(chosen->mode) << " overrides mode = " << to_string(config.mode)
                << " from the config\n";
        }
        config.mode = chosen->mode;
        if (chosen->a->count() > 0) {
            override_value(config.problem.a, flags.a, "--a", "problem.a", from_file, err);
        }
        if (chosen->grid_n->count() > 0) {
            override_value(config.grid.n_cells, flags.grid_n, "--grid-n", "grid.n_cells", from_file, err);
        }
        if (chosen->out->count() > 0) {
            override_value(config.output_dir, flags.out, "--out", "output.directory", from_file && !config.output_dir.empty(),
                           err);
        }
        if (chosen->seed->count() > 0) {
            override_value(config.verify.seed, flags.seed, "--seed", "verify.seed", from_file, err);
        }
        if (chosen->f->count() > 0) {
            NonlinearityConfig f;
            try {
                f = parse_nonlinearity(flags.f);
            } catch (const ConfigError& e) {
                throw ConfigError(std::string("--f: ") + e.what());
            }
            if (from_file && (f.family != config.problem.f.family || f.parameter != config.problem.f.parameter)) {
                err << "notice: --f " << flags.f << " overrides problem.f = " << config.problem.f.family << ":"
                    << show(config.problem.f.parameter) << " from the config\n";
            }
            config.problem.f = f;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return run(config, err);
}

}  // namespace blowup
