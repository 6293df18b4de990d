#pragma once

// Problem description for  Delta u + a u^p = b(x) f(u) - r(x)  on an interval,
// a ball or an annulus, with b(x) = c k(d(x))^2 + perturbation(d(x)).

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "blowup/karamata.hpp"
#include "blowup/nonlinearity.hpp"

namespace blowup {

enum class GeometryKind { interval, ball, annulus };

/// Interval [lo, hi], ball of radius hi (lo = 0) or annulus lo < r < hi.
/// Radial problems use the radial coordinate as the single space variable.
struct Geometry {
    GeometryKind kind = GeometryKind::interval;
    double lo = 0.0;
    double hi = 1.0;
    int dimension = 1;

    static Geometry interval(double lo, double hi);
    static Geometry ball(int dimension, double radius);
    static Geometry annulus(int dimension, double inner, double outer);

    /// Interval: 2 (lo, hi); ball: 1 (the sphere); annulus: 2 (inner, outer).
    [[nodiscard]] int boundary_components() const;
    /// Coordinate of boundary component i.
    [[nodiscard]] double boundary_coordinate(int component) const;
    /// Extent of the coordinate range, hi - lo.
    [[nodiscard]] double extent() const { return hi - lo; }
};

std::string to_string(GeometryKind kind);

struct Dirichlet {
    double value = 0.0;
};
struct Blowup {};
using BoundaryCondition = std::variant<Dirichlet, Blowup>;

struct Potential {
    double c = 1.0;
    KWeight k = KWeight::power(0.0);
    /// Bounded function of d added to c k(d)^2; empty means zero.
    std::function<double(double)> perturbation;
};

struct ProblemSpec {
    Geometry geometry;
    double a = 0.0;
    double p = 0.5;
    Nonlinearity f = Nonlinearity::power(3.0);
    Potential potential;
    /// r(x) >= 0 as a function of the coordinate; empty means zero.
    std::function<double(double)> source;
    /// One entry per boundary component, in Geometry order.
    std::vector<BoundaryCondition> boundary;

    [[nodiscard]] bool has_blowup() const;
    [[nodiscard]] bool is_blowup(int component) const;
    /// b at distance d from the blow-up set.
    [[nodiscard]] double b(double d) const;
    [[nodiscard]] double r(double x) const { return source ? source(x) : 0.0; }
};

/// Checks parameter ranges and boundary-component count; throws DomainError
/// or ConfigError with the offending field named.
void validate(const ProblemSpec& spec);

/// d(x): distance to the nearest blow-up component, or to the nearest
/// boundary component when none is marked blow-up.
double distance_to_boundary(const ProblemSpec& spec, double x);

}  // namespace blowup
