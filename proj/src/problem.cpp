#include "blowup/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

Geometry Geometry::interval(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("interval geometry needs finite lo < hi");
    }
    return Geometry{GeometryKind::interval, lo, hi, 1};
}

Geometry Geometry::ball(int dimension, double radius) {
    if (dimension < 1 || !(radius > 0.0) || !std::isfinite(radius)) {
        throw DomainError("ball geometry needs dimension >= 1 and a finite radius > 0");
    }
    return Geometry{GeometryKind::ball, 0.0, radius, dimension};
}

Geometry Geometry::annulus(int dimension, double inner, double outer) {
    if (dimension < 2 || !(inner > 0.0) || !(outer > inner) || !std::isfinite(outer)) {
        throw DomainError("annulus geometry needs dimension >= 2 and 0 < inner < outer");
    }
    return Geometry{GeometryKind::annulus, inner, outer, dimension};
}

int Geometry::boundary_components() const { return kind == GeometryKind::ball ? 1 : 2; }

double Geometry::boundary_coordinate(int component) const {
    if (kind == GeometryKind::ball) {
        return hi;
    }
    return component == 0 ? lo : hi;
}

std::string to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::interval:
            return "interval";
        case GeometryKind::ball:
            return "ball";
        case GeometryKind::annulus:
            return "annulus";
    }
    return "unknown";
}

bool ProblemSpec::has_blowup() const {
    return std::any_of(boundary.begin(), boundary.end(),
                       [](const BoundaryCondition& bc) { return std::holds_alternative<Blowup>(bc); });
}

bool ProblemSpec::is_blowup(int component) const {
    return std::holds_alternative<Blowup>(boundary.at(static_cast<std::size_t>(component)));
}

double ProblemSpec::b(double d) const {
    const double kd = potential.k(d);
    double value = potential.c * kd * kd;
    if (potential.perturbation) {
        value += potential.perturbation(d);
    }
    return value;
}

void validate(const ProblemSpec& spec) {
    const Geometry& g = spec.geometry;
    if (!(g.lo < g.hi)) {
        throw DomainError("geometry: bounds must be ordered");
    }
    if (g.kind == GeometryKind::annulus && g.dimension < 2) {
        throw DomainError("geometry: annulus needs dimension >= 2");
    }
    if (g.dimension < 1) {
        throw DomainError("geometry: dimension must be >= 1");
    }
    if (!(spec.p > 0.0 && spec.p < 1.0)) {
        throw DomainError("p must lie in (0, 1)");
    }
    if (!std::isfinite(spec.a)) {
        throw DomainError("a must be finite");
    }
    if (!(spec.potential.c > 0.0)) {
        throw DomainError("potential.c must be positive");
    }
    if (static_cast<int>(spec.boundary.size()) != g.boundary_components()) {
        std::ostringstream msg;
        msg << "boundary: " << to_string(g.kind) << " has " << g.boundary_components()
            << " component(s), got " << spec.boundary.size();
        throw ConfigError(msg.str());
    }
    for (std::size_t i = 0; i < spec.boundary.size(); ++i) {
        if (const auto* dir = std::get_if<Dirichlet>(&spec.boundary[i])) {
            if (!(dir->value >= 0.0) || !std::isfinite(dir->value)) {
                std::ostringstream msg;
                msg << "boundary[" << i << "]: Dirichlet value must be finite and >= 0";
                throw DomainError(msg.str());
            }
        }
    }
}

double distance_to_boundary(const ProblemSpec& spec, double x) {
    const Geometry& g = spec.geometry;
    double best = std::numeric_limits<double>::infinity();
    const bool any_blowup = spec.has_blowup();
    for (int i = 0; i < g.boundary_components(); ++i) {
        if (any_blowup && !spec.is_blowup(i)) {
            continue;
        }
        best = std::min(best, std::abs(x - g.boundary_coordinate(i)));
    }
    return best;
}

}  // namespace blowup
