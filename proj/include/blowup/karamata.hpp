#pragma once

// Regular variation toolkit: index estimation at infinity, the Karamata
// integral limit, and the boundary-weight class with its l0/l1 limits.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace blowup {

/// A positive function on [lower, inf), possibly regularly varying.
struct RVFunction {
    std::function<double(double)> eval;
    double lower = 1.0;
    std::optional<double> declared_index;
};

struct RvIndexOptions {
    /// Points on the geometric ladder u_max / 2^n used per xi.
    int points = 12;
    /// Per-xi spread above which the function is declared not regularly varying.
    double spread_threshold = 0.05;
};

struct RvIndexResult {
    /// Empty when the function was flagged as not regularly varying.
    std::optional<double> index;
    std::vector<double> per_xi;
    double spread = 0.0;

    [[nodiscard]] bool regularly_varying() const { return index.has_value(); }
};

/// Estimates q with R(xi u)/R(u) -> xi^q. Throws InvalidFunctionError if R is
/// non-positive or non-finite on the sampled points, DomainError on bad input.
RvIndexResult rv_index_estimate(const RVFunction& fn, double u_max, std::span<const double> xi_set,
                                const RvIndexOptions& opts = {});

struct LimitReport {
    double value = 0.0;
    bool converged = false;
    /// Raw ratios along the ladder, smallest u first.
    std::vector<double> trace;
};

/// Limit of u^{j+1} R(u) / int_D^u x^j R(x) dx as u -> inf (equals q + j + 1
/// for R regularly varying with index q, j > -q-1).
LimitReport karamata_limit(const RVFunction& fn, double j, double lower_limit, double u_max);

enum class WeightKind { power, exp_flat, custom };

/// Positive nondecreasing C^1 weight k on (0, nu) with
/// l_i = lim_{t->0+} (K(t)/k(t))^{(i)}, K(t) = int_0^t k.
class KWeight {
public:
    /// k(t) = t^gamma, gamma >= 0. Closed-form K and l1 = 1/(gamma+1).
    static KWeight power(double gamma, double nu = 1.0);
    /// k(t) = exp(-1/t), l1 = 0.
    static KWeight exp_flat(double nu = 1.0);
    /// User weight; k' must be supplied analytically. l1 is computed, and if
    /// declared_ell1 is given it must agree within 1e-3 (ConfigError otherwise).
    static KWeight custom(std::function<double(double)> k, std::function<double(double)> dk,
                          double nu, std::optional<double> declared_ell1 = std::nullopt,
                          std::string name = "custom");

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double derivative(double t) const;
    /// int_0^t k(s) ds; closed form for power weights, quadrature otherwise.
    [[nodiscard]] double primitive(double t) const;

    [[nodiscard]] WeightKind kind() const { return impl_->kind; }
    [[nodiscard]] double gamma() const { return impl_->gamma; }
    [[nodiscard]] double nu() const { return impl_->nu; }
    [[nodiscard]] double ell0() const { return 0.0; }
    [[nodiscard]] double ell1() const { return impl_->ell1; }
    [[nodiscard]] const std::string& name() const { return impl_->name; }

private:
    struct Impl {
        WeightKind kind = WeightKind::power;
        double gamma = 0.0;
        double nu = 1.0;
        double ell1 = 1.0;
        std::string name;
        std::function<double(double)> k;
        std::function<double(double)> dk;
    };
    explicit KWeight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

struct EllLimits {
    double ell0 = 0.0;
    double ell1 = 0.0;
    /// Raw l1 samples along t_n = t_0 / 2^n.
    std::vector<double> trace;
};

/// Numerical l0/l1 from the weight's evaluators alone. Throws
/// InvalidFunctionError if K cannot be computed, NonConvergenceError if the
/// limits do not stabilize or leave their admissible ranges.
EllLimits ell_limits(const KWeight& k);

/// int_0^t k(s) ds for 0 < t < nu; DomainError otherwise.
double k_primitive(const KWeight& k, double t);

}  // namespace blowup
