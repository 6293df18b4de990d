#include "blowup/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "blowup/errors.hpp"
#include "json.hpp"

namespace blowup {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
    throw ConfigError((path.empty() ? std::string("<root>") : path) + ": " + reason);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads the keys of one JSON object, remembering which ones were consumed so
// that finish() can reject the rest.
class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            fail(path_, "expected an object");
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return node_.contains(key); }
    [[nodiscard]] std::string path(const std::string& key) const { return join(path_, key); }

    const json* take(const std::string& key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) {
                fail(path(key), "expected a number");
            }
            out = v->get<double>();
            if (!std::isfinite(out)) {
                fail(path(key), "must be finite");
            }
        }
    }

    void integer(const std::string& key, int& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_integer()) {
                fail(path(key), "expected an integer");
            }
            out = v->get<int>();
        }
    }

    void unsigned_integer(const std::string& key, std::uint64_t& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned()) {
                fail(path(key), "expected a nonnegative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) {
                fail(path(key), "expected true or false");
            }
            out = v->get<bool>();
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) {
                fail(path(key), "expected a string");
            }
            out = v->get<std::string>();
        }
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        if (const json* v = take(key)) {
            if (!v->is_array()) {
                fail(path(key), "expected an array of numbers");
            }
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number()) {
                    fail(path(key) + "[" + std::to_string(i) + "]", "expected a number");
                }
                out.push_back((*v)[i].get<double>());
            }
        }
    }

    void finish() const {
        for (const auto& item : node_.items()) {
            if (!seen_.count(item.key())) {
                fail(path(item.key()), "unknown key");
            }
        }
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class Fn>
void section(Reader& parent, const std::string& key, Fn&& fn) {
    if (const json* v = parent.take(key)) {
        Reader child(*v, parent.path(key));
        fn(child);
        child.finish();
    }
}

GeometryKind geometry_kind(const std::string& name, const std::string& path) {
    if (name == "interval") {
        return GeometryKind::interval;
    }
    if (name == "ball") {
        return GeometryKind::ball;
    }
    if (name == "annulus") {
        return GeometryKind::annulus;
    }
    fail(path, "expected one of interval, ball, annulus");
}

void read_geometry(Reader& r, GeometryConfig& g) {
    std::string kind = to_string(g.kind);
    r.string("kind", kind);
    g.kind = geometry_kind(kind, r.path("kind"));
    switch (g.kind) {
        case GeometryKind::interval:
            g.dimension = 1;
            r.number("lo", g.lo);
            r.number("hi", g.hi);
            break;
        case GeometryKind::ball:
            g.lo = 0.0;
            r.integer("dimension", g.dimension);
            r.number("radius", g.hi);
            break;
        case GeometryKind::annulus:
            r.integer("dimension", g.dimension);
            r.number("inner", g.lo);
            r.number("outer", g.hi);
            break;
    }
}

json write_geometry(const GeometryConfig& g) {
    switch (g.kind) {
        case GeometryKind::interval:
            return {{"kind", "interval"}, {"lo", g.lo}, {"hi", g.hi}};
        case GeometryKind::ball:
            return {{"kind", "ball"}, {"dimension", g.dimension}, {"radius", g.hi}};
        case GeometryKind::annulus:
            break;
    }
    return {{"kind", "annulus"}, {"dimension", g.dimension}, {"inner", g.lo}, {"outer", g.hi}};
}

const char* parameter_key(const std::string& family) {
    if (family == "power" || family == "power_log") {
        return "q";
    }
    if (family == "log_power") {
        return "p";
    }
    return nullptr;
}

void read_nonlinearity(const json& node, const std::string& path, NonlinearityConfig& f) {
    if (node.is_string()) {
        try {
            f = parse_nonlinearity(node.get<std::string>());
        } catch (const ConfigError& e) {
            fail(path, e.what());
        }
        return;
    }
    Reader r(node, path);
    r.string("family", f.family);
    const char* key = parameter_key(f.family);
    if (key == nullptr && f.family != "exponential") {
        fail(r.path("family"), "expected one of power, exponential, power_log, log_power");
    }
    if (key != nullptr) {
        if (!r.has(key)) {
            fail(r.path(key), "required for family " + f.family);
        }
        r.number(key, f.parameter);
    } else {
        f.parameter = 0.0;
    }
    r.finish();
}

json write_nonlinearity(const NonlinearityConfig& f) {
    json j = {{"family", f.family}};
    if (const char* key = parameter_key(f.family)) {
        j[key] = f.parameter;
    }
    return j;
}

void read_boundary(const json& node, const std::string& path, std::vector<BoundaryConfig>& out) {
    if (!node.is_array()) {
        fail(path, "expected an array of boundary conditions");
    }
    out.clear();
    for (std::size_t i = 0; i < node.size(); ++i) {
        Reader r(node[i], path + "[" + std::to_string(i) + "]");
        std::string type;
        r.string("type", type);
        BoundaryConfig bc;
        if (type == "blowup") {
            bc.blowup = true;
        } else if (type == "dirichlet") {
            if (!r.has("value")) {
                fail(r.path("value"), "required for a dirichlet condition");
            }
            r.number("value", bc.value);
        } else {
            fail(r.path("type"), "expected blowup or dirichlet");
        }
        r.finish();
        out.push_back(bc);
    }
}

void read_problem(Reader& r, ProblemConfig& p) {
    section(r, "geometry", [&](Reader& g) { read_geometry(g, p.geometry); });
    r.number("a", p.a);
    r.number("p", p.p);
    if (const json* f = r.take("f")) {
        read_nonlinearity(*f, r.path("f"), p.f);
    }
    section(r, "potential", [&](Reader& pot) {
        pot.number("c", p.potential.c);
        section(pot, "k", [&](Reader& k) {
            k.string("family", p.potential.k.family);
            if (p.potential.k.family == "power") {
                k.number("gamma", p.potential.k.gamma);
            } else if (p.potential.k.family == "exp_flat") {
                p.potential.k.gamma = 0.0;
            } else {
                fail(k.path("family"), "expected power or exp_flat");
            }
            k.number("nu", p.potential.k.nu);
        });
        section(pot, "perturbation", [&](Reader& pert) {
            pert.number("amplitude", p.potential.perturbation_amplitude);
            pert.number("frequency", p.potential.perturbation_frequency);
        });
    });
    section(r, "source", [&](Reader& s) {
        s.string("kind", p.source.kind);
        if (p.source.kind == "constant") {
            s.number("value", p.source.value);
        } else if (p.source.kind == "manufactured") {
            s.numbers("coefficients", p.source.coefficients);
            if (p.source.coefficients.empty()) {
                fail(s.path("coefficients"), "needs at least one coefficient");
            }
        } else if (p.source.kind != "none") {
            fail(s.path("kind"), "expected none, constant or manufactured");
        }
    });
    if (const json* b = r.take("boundary")) {
        read_boundary(*b, r.path("boundary"), p.boundary);
    }
}

json write_problem(const ProblemConfig& p) {
    json k = {{"family", p.potential.k.family}, {"nu", p.potential.k.nu}};
    if (p.potential.k.family == "power") {
        k["gamma"] = p.potential.k.gamma;
    }
    json source = {{"kind", p.source.kind}};
    if (p.source.kind == "constant") {
        source["value"] = p.source.value;
    } else if (p.source.kind == "manufactured") {
        source["coefficients"] = p.source.coefficients;
    }
    json boundary = json::array();
    for (const BoundaryConfig& bc : p.boundary) {
        boundary.push_back(bc.blowup ? json{{"type", "blowup"}} : json{{"type", "dirichlet"}, {"value", bc.value}});
    }
    return {{"geometry", write_geometry(p.geometry)},
            {"a", p.a},
            {"p", p.p},
            {"f", write_nonlinearity(p.f)},
            {"potential",
             {{"c", p.potential.c},
              {"k", k},
              {"perturbation",
               {{"amplitude", p.potential.perturbation_amplitude},
                {"frequency", p.potential.perturbation_frequency}}}}},
            {"source", source},
            {"boundary", boundary}};
}

double polynomial(const std::vector<double>& c, double x, int derivative) {
    double value = 0.0;
    for (std::size_t i = c.size(); i-- > static_cast<std::size_t>(derivative);) {
        double factor = 1.0;
        for (int k = 0; k < derivative; ++k) {
            factor *= static_cast<double>(i - static_cast<std::size_t>(k));
        }
        value = value * x + factor * c[i];
    }
    return value;
}

}  // namespace

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::profile:
            return "profile";
        case Mode::solve:
            return "solve";
        case Mode::verify_rate:
            return "verify-rate";
        case Mode::sweep:
            return "sweep";
        case Mode::ko_check:
            return "ko-check";
        case Mode::mixed:
            return "mixed";
    }
    return "solve";
}

std::optional<Mode> parse_mode(std::string_view name) {
    for (Mode m : {Mode::profile, Mode::solve, Mode::verify_rate, Mode::sweep, Mode::ko_check, Mode::mixed}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

NonlinearityConfig parse_nonlinearity(std::string_view text) {
    if (text == "linear") {
        return {"power", 1.0};
    }
    if (text == "sqrt") {
        return {"power", 0.5};
    }
    if (text == "exponential") {
        return {"exponential", 0.0};
    }
    const auto colon = text.find(':');
    const std::string family(text.substr(0, colon));
    if (colon == std::string_view::npos || parameter_key(family) == nullptr) {
        throw ConfigError("unknown nonlinearity '" + std::string(text) +
                          "'; use linear, sqrt, exponential or family:parameter (power, power_log, log_power)");
    }
    const std::string number(text.substr(colon + 1));
    std::istringstream in(number);
    in.imbue(std::locale::classic());
    double value = 0.0;
    if (!(in >> value) || !in.eof() || !std::isfinite(value)) {
        throw ConfigError("nonlinearity parameter '" + number + "' is not a number");
    }
    return {family, value};
}

ExperimentConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("<root>: malformed JSON: ") + e.what());
    }
    ExperimentConfig c;
    Reader r(root, "");
    std::string mode = to_string(c.mode);
    r.string("mode", mode);
    const auto parsed = parse_mode(mode);
    if (!parsed) {
        fail("mode", "expected one of profile, solve, verify-rate, sweep, ko-check, mixed");
    }
    c.mode = *parsed;
    section(r, "problem", [&](Reader& p) { read_problem(p, c.problem); });
    section(r, "grid", [&](Reader& g) {
        g.integer("n_cells", c.grid.n_cells);
        std::string grading = c.grid.grading == Grading::uniform ? "uniform" : "geometric";
        g.string("grading", grading);
        if (grading != "uniform" && grading != "geometric") {
            fail(g.path("grading"), "expected uniform or geometric");
        }
        c.grid.grading = grading == "uniform" ? Grading::uniform : Grading::geometric;
        g.number("ratio", c.grid.ratio);
        g.number("first_cell", c.grid.first_cell);
    });
    section(r, "blowup", [&](Reader& b) {
        b.string("mode", c.blowup_mode);
        if (c.blowup_mode != "schedule" && c.blowup_mode != "asymptotic") {
            fail(b.path("mode"), "expected schedule or asymptotic");
        }
        b.number("delta", c.delta);
        section(b, "schedule", [&](Reader& s) {
            s.number("m0", c.schedule.m0);
            s.number("growth", c.schedule.growth);
            s.integer("max_stages", c.schedule.max_stages);
            s.integer("min_stages", c.schedule.min_stages);
            s.number("tol_interior", c.schedule.tol_interior);
            s.number("d_core", c.schedule.d_core);
            s.boolean("require_stabilization", c.schedule.require_stabilization);
            s.boolean("lift_potential", c.schedule.lift_potential);
        });
    });
    section(r, "newton", [&](Reader& n) {
        n.number("tol", c.newton.tol);
        n.integer("max_iterations", c.newton.max_iterations);
        n.integer("max_halvings", c.newton.max_halvings);
        n.number("jacobian_floor", c.newton.jacobian_floor);
    });
    section(r, "verify", [&](Reader& v) {
        v.number("d_min", c.verify.d_min);
        v.number("d_max", c.verify.d_max);
        v.number("rate_tolerance", c.verify.rate_tolerance);
        v.number("manufactured_tolerance", c.verify.manufactured_tolerance);
        v.integer("comparison_trials", c.verify.comparison_trials);
        v.integer("uniqueness_inits", c.verify.uniqueness_inits);
        v.unsigned_integer("seed", c.verify.seed);
        std::uint64_t threads = c.verify.threads;
        v.unsigned_integer("threads", threads);
        c.verify.threads = static_cast<unsigned>(threads);
        v.string("expect_ko", c.verify.expect_ko);
        if (!c.verify.expect_ko.empty() && c.verify.expect_ko != "holds" && c.verify.expect_ko != "fails") {
            fail(v.path("expect_ko"), "expected holds, fails or an empty string");
        }
    });
    section(r, "sweep", [&](Reader& s) {
        s.numbers("a_values", c.sweep.a_values);
        s.number("spread_tolerance", c.sweep.spread_tolerance);
    });
    section(r, "profile", [&](Reader& p) {
        p.number("t_lo", c.profile.t_lo);
        p.number("t_hi", c.profile.t_hi);
        p.integer("per_decade", c.profile.per_decade);
    });
    section(r, "mixed", [&](Reader& m) {
        m.number("eps0", c.mixed.eps0);
        m.integer("max_domains", c.mixed.max_domains);
        m.number("shrink_tol", c.mixed.shrink_tol);
        m.number("core_tolerance", c.mixed.core_tolerance);
    });
    section(r, "output", [&](Reader& o) { o.string("directory", c.output_dir); });
    r.finish();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open config file");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    const json root = {
        {"mode", to_string(c.mode)},
        {"problem", write_problem(c.problem)},
        {"grid",
         {{"n_cells", c.grid.n_cells},
          {"grading", c.grid.grading == Grading::uniform ? "uniform" : "geometric"},
          {"ratio", c.grid.ratio},
          {"first_cell", c.grid.first_cell}}},
        {"blowup",
         {{"mode", c.blowup_mode},
          {"delta", c.delta},
          {"schedule",
           {{"m0", c.schedule.m0},
            {"growth", c.schedule.growth},
            {"max_stages", c.schedule.max_stages},
            {"min_stages", c.schedule.min_stages},
            {"tol_interior", c.schedule.tol_interior},
            {"d_core", c.schedule.d_core},
            {"require_stabilization", c.schedule.require_stabilization},
            {"lift_potential", c.schedule.lift_potential}}}}},
        {"newton",
         {{"tol", c.newton.tol},
          {"max_iterations", c.newton.max_iterations},
          {"max_halvings", c.newton.max_halvings},
          {"jacobian_floor", c.newton.jacobian_floor}}},
        {"verify",
         {{"d_min", c.verify.d_min},
          {"d_max", c.verify.d_max},
          {"rate_tolerance", c.verify.rate_tolerance},
          {"manufactured_tolerance", c.verify.manufactured_tolerance},
          {"comparison_trials", c.verify.comparison_trials},
          {"uniqueness_inits", c.verify.uniqueness_inits},
          {"seed", c.verify.seed},
          {"threads", c.verify.threads},
          {"expect_ko", c.verify.expect_ko}}},
        {"sweep", {{"a_values", c.sweep.a_values}, {"spread_tolerance", c.sweep.spread_tolerance}}},
        {"profile", {{"t_lo", c.profile.t_lo}, {"t_hi", c.profile.t_hi}, {"per_decade", c.profile.per_decade}}},
        {"mixed",
         {{"eps0", c.mixed.eps0},
          {"max_domains", c.mixed.max_domains},
          {"shrink_tol", c.mixed.shrink_tol},
          {"core_tolerance", c.mixed.core_tolerance}}},
        {"output", {{"directory", c.output_dir}}},
    };
    return root.dump(2) + "\n";
}

ProblemSpec make_spec(const ProblemConfig& c) {
    ProblemSpec spec;
    try {
        switch (c.geometry.kind) {
            case GeometryKind::interval:
                spec.geometry = Geometry::interval(c.geometry.lo, c.geometry.hi);
                break;
            case GeometryKind::ball:
                spec.geometry = Geometry::ball(c.geometry.dimension, c.geometry.hi);
                break;
            case GeometryKind::annulus:
                spec.geometry = Geometry::annulus(c.geometry.dimension, c.geometry.lo, c.geometry.hi);
                break;
        }
    } catch (const Error& e) {
        fail("problem.geometry", e.what());
    }
    spec.a = c.a;
    spec.p = c.p;
    try {
        if (c.f.family == "power") {
            spec.f = Nonlinearity::power(c.f.parameter);
        } else if (c.f.family == "exponential") {
            spec.f = Nonlinearity::exponential();
        } else if (c.f.family == "power_log") {
            spec.f = Nonlinearity::power_log(c.f.parameter);
        } else if (c.f.family == "log_power") {
            spec.f = Nonlinearity::log_power(c.f.parameter);
        } else {
            fail("problem.f.family", "unknown family " + c.f.family);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail("problem.f", e.what());
    }
    spec.potential.c = c.potential.c;
    try {
        spec.potential.k = c.potential.k.family == "exp_flat" ? KWeight::exp_flat(c.potential.k.nu)
                                                             : KWeight::power(c.potential.k.gamma, c.potential.k.nu);
    } catch (const Error& e) {
        fail("problem.potential.k", e.what());
    }
    if (c.potential.perturbation_amplitude != 0.0) {
        const double amp = c.potential.perturbation_amplitude;
        const double freq = c.potential.perturbation_frequency;
        spec.potential.perturbation = [amp, freq](double d) { return amp * std::sin(freq * d); };
    }
    for (const BoundaryConfig& bc : c.boundary) {
        spec.boundary.push_back(bc.blowup ? BoundaryCondition{Blowup{}} : BoundaryCondition{Dirichlet{bc.value}});
    }
    try {
        validate(spec);
    } catch (const ConfigError& e) {
        fail("problem", e.what());
    } catch (const Error& e) {
        fail("problem", e.what());
    }
    if (c.source.kind == "constant") {
        if (!(c.source.value >= 0.0)) {
            fail("problem.source.value", "must be >= 0");
        }
        const double value = c.source.value;
        spec.source = [value](double) { return value; };
    } else if (c.source.kind == "manufactured") {
        // r = b f(u*) - a u*^p - Laplacian(u*), so that u* is an exact solution.
        const ProblemSpec base = spec;
        const std::vector<double> coef = c.source.coefficients;
        const bool radial = c.geometry.kind != GeometryKind::interval;
        const int dim = spec.geometry.dimension;
        spec.source = [base, coef, radial, dim](double x) {
            const double u = polynomial(coef, x, 0);
            double lap = polynomial(coef, x, 2);
            if (radial && dim > 1) {
                lap = x > 0.0 ? lap + (dim - 1) * polynomial(coef, x, 1) / x : dim * lap;
            }
            return base.b(distance_to_boundary(base, x)) * base.f(u) - base.a * std::pow(u, base.p) - lap;
        };
    }
    return spec;
}

std::optional<double> manufactured_value(const ProblemConfig& config, double x) {
    if (config.source.kind != "manufactured") {
        return std::nullopt;
    }
    return polynomial(config.source.coefficients, x, 0);
}

}  // namespace blowup
