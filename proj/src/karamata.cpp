#include "blowup/karamata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <utility>

#include "blowup/errors.hpp"
#include "blowup/limits.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

namespace {

double checked_log(const RVFunction& fn, double u) {
    const double v = fn.eval(u);
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "regularly varying function must be positive and finite; R(" << u << ") = " << v;
        throw InvalidFunctionError(msg.str());
    }
    return std::log(v);
}

// Slowly varying corrections decay like powers of 1/ln(u), so u -> inf
// limits are extrapolated in s = 1/ln(u) rather than in u itself.
constexpr int kLogFitDegree = 2;

}  // namespace

RvIndexResult rv_index_estimate(const RVFunction& fn, double u_max, std::span<const double> xi_set,
                                const RvIndexOptions& opts) {
    if (xi_set.empty()) {
        throw DomainError("rv_index_estimate: xi_set must be nonempty");
    }
    if (!(fn.lower > 0.0) || !(u_max >= 10.0 * fn.lower)) {
        throw DomainError("rv_index_estimate: need lower > 0 and u_max >= 10 * lower");
    }
    RvIndexResult result;
    bool diverging = false;
    for (double xi : xi_set) {
        if (!(xi > 1.0)) {
            throw DomainError("rv_index_estimate: every xi must exceed 1");
        }
        const double log_xi = std::log(xi);
        std::vector<double> s;
        std::vector<double> est;
        const double floor_u = std::max(fn.lower, std::exp(2.0));
        double u = u_max / xi;
        for (int n = 0; n < opts.points && u >= floor_u; ++n, u *= 0.5) {
            const double e = (checked_log(fn, xi * u) - checked_log(fn, u)) / log_xi;
            s.push_back(1.0 / std::log(u));
            est.push_back(e);
        }
        if (est.size() < 4) {
            throw DomainError("rv_index_estimate: u_max leaves fewer than 4 ladder points");
        }
        const double full = limits::extrapolate_to_zero(s, est, kLogFitDegree);
        // Same fit on the upper two thirds of the ladder; a real limit makes
        // the two agree, a divergent sequence does not.
        const std::size_t keep = std::max<std::size_t>(4, (2 * est.size()) / 3);
        const double upper = limits::extrapolate_to_zero(std::span(s).first(keep),
                                                         std::span(est).first(keep), kLogFitDegree);
        if (!std::isfinite(full) || std::abs(full - upper) > opts.spread_threshold) {
            diverging = true;
        }
        result.per_xi.push_back(full);
    }
    const auto [lo, hi] = std::minmax_element(result.per_xi.begin(), result.per_xi.end());
    result.spread = *hi - *lo;
    if (!diverging && result.spread <= opts.spread_threshold) {
        double sum = 0.0;
        for (double v : result.per_xi) {
            sum += v;
        }
        result.index = sum / static_cast<double>(result.per_xi.size());
    }
    return result;
}

LimitReport karamata_limit(const RVFunction& fn, double j, double lower_limit, double u_max) {
    if (!(lower_limit >= fn.lower) || !(u_max > 64.0 * lower_limit)) {
        throw DomainError("karamata_limit: need D >= lower and u_max > 64 D");
    }
    LimitReport report;
    std::vector<double> s;
    const quad::Options qopts{0.0, 1e-13, 4000};
    double integral = 0.0;
    double u_prev = lower_limit;
    for (double u = 2.0 * lower_limit; u <= u_max; u *= 2.0) {
        integral += quad::integrate_or_throw(
            [&](double x) { return std::pow(x, j) * fn.eval(x); }, u_prev, u, qopts);
        u_prev = u;
        if (!(integral > 0.0) || !std::isfinite(integral)) {
            throw InvalidFunctionError("karamata_limit: denominator integral is not finite and positive");
        }
        const double numerator = std::pow(u, j + 1.0) * fn.eval(u);
        report.trace.push_back(numerator / integral);
        s.push_back(1.0 / std::log(u));
    }
    const std::size_t n = report.trace.size();
    const std::size_t use = std::min<std::size_t>(n, 12);
    if (use < 6 || !(s[n - use] > 0.0)) {
        throw DomainError("karamata_limit: u_max too small for extrapolation");
    }
    const auto tail_s = std::span(s).last(use);
    const auto tail_r = std::span<const double>(report.trace).last(use);
    report.value = limits::extrapolate_to_zero(tail_s, tail_r, kLogFitDegree);
    const double shorter =
        limits::extrapolate_to_zero(tail_s.last(use - 3), tail_r.last(use - 3), kLogFitDegree);
    report.converged = std::isfinite(report.value) &&
                       std::abs(report.value - shorter) <= 1e-4 * std::max(1.0, std::abs(report.value));
    return report;
}

// ---------------------------------------------------------------------------

KWeight KWeight::power(double gamma, double nu) {
    if (!(gamma >= 0.0) || !(nu > 0.0)) {
        throw DomainError("KWeight::power: need gamma >= 0 and nu > 0");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = WeightKind::power;
    impl->gamma = gamma;
    impl->nu = nu;
    impl->ell1 = 1.0 / (gamma + 1.0);
    impl->name = "power";
    impl->k = [gamma](double t) { return std::pow(t, gamma); };
    impl->dk = [gamma](double t) { return gamma == 0.0 ? 0.0 : gamma * std::pow(t, gamma - 1.0); };
    return KWeight(std::move(impl));
}

KWeight KWeight::exp_flat(double nu) {
    if (!(nu > 0.0)) {
        throw DomainError("KWeight::exp_flat: need nu > 0");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = WeightKind::exp_flat;
    impl->nu = nu;
    impl->ell1 = 0.0;
    impl->name = "exp_flat";
    impl->k = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    impl->dk = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; };
    return KWeight(std::move(impl));
}

KWeight KWeight::custom(std::function<double(double)> k, std::function<double(double)> dk,
                        double nu, std::optional<double> declared_ell1, std::string name) {
    if (!k || !dk) {
        throw ConfigError("custom weight needs both k and an analytic k'");
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) {
        throw DomainError("KWeight::custom: need finite nu > 0");
    }
    for (int i = 1; i <= 64; ++i) {
        const double t = nu * i / 65.0;
        const double kv = k(t);
        const double dkv = dk(t);
        if (!(kv > 0.0) || !std::isfinite(kv) || !(dkv >= 0.0) || !std::isfinite(dkv)) {
            std::ostringstream msg;
            msg << "custom weight must be positive and nondecreasing; at t=" << t << " k=" << kv
                << " k'=" << dkv;
            throw InvalidFunctionError(msg.str());
        }
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = WeightKind::custom;
    impl->nu = nu;
    impl->name = std::move(name);
    impl->k = std::move(k);
    impl->dk = std::move(dk);
    impl->ell1 = 0.0;
    KWeight provisional(impl);
    const EllLimits limits = ell_limits(provisional);
    if (declared_ell1 && std::abs(*declared_ell1 - limits.ell1) > 1e-3) {
        std::ostringstream msg;
        msg << "declared l1 = " << *declared_ell1 << " disagrees with computed l1 = " << limits.ell1;
        throw ConfigError(msg.str());
    }
    impl->ell1 = limits.ell1;
    return KWeight(std::move(impl));
}

double KWeight::operator()(double t) const { return impl_->k(t); }

double KWeight::derivative(double t) const { return impl_->dk(t); }

double KWeight::primitive(double t) const {
    if (t <= 0.0) {
        return 0.0;
    }
    if (impl_->kind == WeightKind::power) {
        return std::pow(t, impl_->gamma + 1.0) / (impl_->gamma + 1.0);
    }
    const auto& k = impl_->k;
    const quad::Options opts{0.0, 1e-14, 4000};
    return quad::integrate_or_throw([&](double s) { return k(s); }, 0.0, t, opts);
}

double k_primitive(const KWeight& k, double t) {
    if (!(t > 0.0) || !(t < k.nu())) {
        std::ostringstream msg;
        msg << "k_primitive: t = " << t << " outside (0, " << k.nu() << ")";
        throw DomainError(msg.str());
    }
    return k.primitive(t);
}

EllLimits ell_limits(const KWeight& k) {
    EllLimits out;
    const double t0 = std::isfinite(k.nu()) ? k.nu() / 4.0 : 0.25;
    std::vector<double> ratio;
    std::vector<double> slope;
    std::vector<double> scale;
    auto g = [&](double t) {
        double big_k = 0.0;
        try {
            big_k = k.primitive(t);
        } catch (const NumericError& e) {
            throw InvalidFunctionError(std::string("ell_limits: cannot integrate weight: ") + e.what());
        }
        return big_k / k(t);
    };
    double t = t0;
    for (int n = 0; n < 40; ++n, t *= 0.5) {
        const double step = t / 100.0;
        if (k(t - step) < 1e-280 || !(k.primitive(t - step) > 1e-290)) {
            break;
        }
        const double gm = g(t - step);
        const double gp = g(t + step);
        const double g0 = g(t);
        if (!std::isfinite(gm) || !std::isfinite(gp) || !std::isfinite(g0)) {
            throw InvalidFunctionError("ell_limits: K/k not finite");
        }
        scale.push_back(t);
        ratio.push_back(g0);
        slope.push_back((gp - gm) / (2.0 * step));
    }
    if (ratio.size() < 6) {
        throw NonConvergenceError("ell_limits: too few resolvable scales near t = 0", slope);
    }
    out.trace = slope;
    // Richardson-style polynomial extrapolation in t over the smallest scales;
    // a second fit on one point fewer measures stability.
    const std::size_t use = std::min<std::size_t>(scale.size(), 6);
    const auto ts = std::span<const double>(scale).last(use);
    auto extrapolate = [&](const std::vector<double>& seq) {
        const auto ys = std::span<const double>(seq).last(use);
        const double full = limits::extrapolate_to_zero(ts, ys, 3);
        const double shorter = limits::extrapolate_to_zero(ts.last(use - 1), ys.last(use - 1), 3);
        return std::pair{full, std::abs(full - shorter)};
    };
    const auto [l0_value, l0_spread] = extrapolate(ratio);
    const auto [l1_value, l1_spread] = extrapolate(slope);
    constexpr double kTol = 1e-4;
    if (!std::isfinite(l1_value) || l1_spread > kTol) {
        throw NonConvergenceError("ell_limits: l1 sequence did not stabilize", slope);
    }
    if (!(std::abs(l0_value) <= kTol) || l0_spread > kTol) {
        throw NonConvergenceError("ell_limits: l0 does not vanish", ratio);
    }
    if (l1_value < -kTol || l1_value > 1.0 + kTol) {
        throw NonConvergenceError("ell_limits: l1 outside [0, 1]", slope);
    }
    out.ell0 = l0_value;
    out.ell1 = std::clamp(l1_value, 0.0, 1.0);
    return out;
}

}  // namespace blowup
