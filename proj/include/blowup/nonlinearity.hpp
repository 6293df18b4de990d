#pragma once

// Reaction terms f, their primitives F(u) = int_0^u f, and the growth
// conditions that govern boundary blow-up.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

enum class NonlinearityKind { power, exponential, power_log, log_power, custom };

/// Reaction term f with derivative and primitive. Immutable; copies share
/// the precomputed primitive table.
///
/// Built-in families:
///   power(q)      f = u^q
///   exponential   f = e^u            (F = e^u - 1)
///   power_log(q)  f = u^q ln(1+u)
///   log_power(p)  f = u ln^p(1+u)
///
/// rv_index() is rho + 1 where f is regularly varying with that index;
/// rho() is set only when rho > 0. The alternative convention indexing f'
/// (f' in RV_rho) agrees for the built-in families and is not used here.
class Nonlinearity {
public:
    static Nonlinearity power(double q);
    static Nonlinearity exponential();
    static Nonlinearity power_log(double q);
    static Nonlinearity log_power(double p);
    /// f' is mandatory (Newton Jacobians need it); F falls back to quadrature.
    static Nonlinearity custom(std::function<double(double)> f, std::function<double(double)> df,
                               std::optional<std::function<double(double)>> primitive = std::nullopt,
                               std::optional<double> rv_index = std::nullopt,
                               std::string name = "custom");

    [[nodiscard]] double operator()(double u) const { return impl_->f(u); }
    [[nodiscard]] double derivative(double u) const { return impl_->df(u); }
    /// F(u) for u >= 0; +inf once F overflows.
    [[nodiscard]] double primitive(double u) const;

    [[nodiscard]] NonlinearityKind kind() const { return impl_->kind; }
    [[nodiscard]] double parameter() const { return impl_->parameter; }
    [[nodiscard]] std::optional<double> rv_index() const { return impl_->rv_index; }
    [[nodiscard]] std::optional<double> rho() const;
    [[nodiscard]] const std::string& name() const { return impl_->name; }
    [[nodiscard]] bool has_closed_primitive() const { return static_cast<bool>(impl_->closed_primitive); }

    /// (h1) by sampling: f(0) = 0 (waived for the exponential family) and f > 0 on (0, inf).
    [[nodiscard]] bool satisfies_h1() const;
    /// (h2) by sampling; not required by the rate theory, reported as a warning.
    [[nodiscard]] bool is_nondecreasing_sampled() const;

private:
    struct Impl {
        NonlinearityKind kind = NonlinearityKind::power;
        double parameter = 0.0;
        std::optional<double> rv_index;
        std::string name;
        std::function<double(double)> f;
        std::function<double(double)> df;
        std::function<double(double)> closed_primitive;
        // Cumulative F at u = 2^k, k = kTableMinExp, ... (quadrature kinds only).
        std::vector<double> table;
    };
    explicit Nonlinearity(std::shared_ptr<Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

/// F(u) = int_0^u f(s) ds; DomainError for u < 0 or non-finite u.
double primitive_F(const Nonlinearity& f, double u);

enum class KoClass { holds, fails, inconclusive };

std::string to_string(KoClass c);

struct KoDiagnostic {
    KoClass classification = KoClass::inconclusive;
    /// int over [2^n, 2^{n+1}] of 1/sqrt(F), n = 0, 1, ...
    std::vector<double> panel_sums;
    /// Which rule decided: "geometric-ratio", "bounded-below", "log-tail", "none".
    std::string rule;
    /// Fitted tail exponent beta of panel sums ~ n^-beta (log-tail rule), if computed.
    std::optional<double> log_tail_exponent;
};

/// Numerical classifier for the convergence of int^inf du / sqrt(F(u)).
/// Throws InvalidFunctionError if F vanishes at some u > 0.
KoDiagnostic keller_osserman(const Nonlinearity& f);

struct H4Check {
    bool increasing = true;
    /// First adjacent pair (u_i, u_{i+1}) where f/u^p fails to increase.
    std::optional<std::pair<double, double>> violation;
};

/// Samples u -> f(u)/u^p on the grid. Evidence, not proof.
H4Check check_h4(const Nonlinearity& f, double p, std::span<const double> grid);

/// n points geometrically spaced on [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, int n);

/// phi(v) = int_v^inf ds / sqrt(F(s)). Throws KellerOssermanError when the
/// tail does not converge.
double phi_tail(const Nonlinearity& f, double v);

struct GurtinMacCamy {
    double p = 0.0;
    double q = 0.0;
    /// q > 1, i.e. m < 2.
    bool superlinear_admissible = false;
};

/// Exponents of Delta u + a u^p = b u^q obtained from Delta w^m + a w = b w^2 via u = w^m.
GurtinMacCamy gurtin_maccamy_transform(double m);

}  // namespace blowup
