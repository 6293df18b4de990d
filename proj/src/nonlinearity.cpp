#include "blowup/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "blowup/errors.hpp"
#include "blowup/limits.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

namespace {

constexpr int kTableMinExp = -30;
constexpr int kTableMaxExp = 1020;
const quad::Options kPrimitiveQuad{0.0, 1e-14, 4000};

}  // namespace

Nonlinearity::Nonlinearity(std::shared_ptr<Impl> impl) {
    if (!impl->closed_primitive) {
        // Cumulative primitive at dyadic nodes; F(u) then needs one panel.
        const auto& f = impl->f;
        double lo = std::ldexp(1.0, kTableMinExp);
        double acc = quad::integrate_or_throw([&](double s) { return f(s); }, 0.0, lo, kPrimitiveQuad);
        impl->table.push_back(acc);
        for (int k = kTableMinExp; k < kTableMaxExp; ++k) {
            const double a = std::ldexp(1.0, k);
            double piece = 0.0;
            try {
                piece = quad::integrate_or_throw([&](double s) { return f(s); }, a, 2.0 * a,
                                                 kPrimitiveQuad);
            } catch (const NumericError&) {
                break;  // f overflowed; F is +inf beyond the last node
            }
            acc += piece;
            if (!std::isfinite(acc)) {
                break;
            }
            impl->table.push_back(acc);
        }
    }
    impl_ = std::move(impl);
}

Nonlinearity Nonlinearity::power(double q) {
    if (!(q > 0.0)) {
        throw DomainError("Nonlinearity::power: need q > 0");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = NonlinearityKind::power;
    impl->parameter = q;
    impl->rv_index = q;
    impl->name = "power";
    impl->f = [q](double u) { return std::pow(u, q); };
    impl->df = [q](double u) { return q * std::pow(u, q - 1.0); };
    impl->closed_primitive = [q](double u) { return std::pow(u, q + 1.0) / (q + 1.0); };
    return Nonlinearity(std::move(impl));
}

Nonlinearity Nonlinearity::exponential() {
    auto impl = std::make_shared<Impl>();
    impl->kind = NonlinearityKind::exponential;
    impl->name = "exponential";
    impl->f = [](double u) { return std::exp(u); };
    impl->df = [](double u) { return std::exp(u); };
    impl->closed_primitive = [](double u) { return std::expm1(u); };
    return Nonlinearity(std::move(impl));
}

Nonlinearity Nonlinearity::power_log(double q) {
    if (!(q > 0.0)) {
        throw DomainError("Nonlinearity::power_log: need q > 0");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = NonlinearityKind::power_log;
    impl->parameter = q;
    impl->rv_index = q;
    impl->name = "power_log";
    impl->f = [q](double u) { return std::pow(u, q) * std::log1p(u); };
    impl->df = [q](double u) {
        return q * std::pow(u, q - 1.0) * std::log1p(u) + std::pow(u, q) / (1.0 + u);
    };
    return Nonlinearity(std::move(impl));
}

Nonlinearity Nonlinearity::log_power(double p) {
    if (!(p > 0.0)) {
        throw DomainError("Nonlinearity::log_power: need p > 0");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = NonlinearityKind::log_power;
    impl->parameter = p;
    impl->rv_index = 1.0;
    impl->name = "log_power";
    impl->f = [p](double u) { return u * std::pow(std::log1p(u), p); };
    impl->df = [p](double u) {
        const double l = std::log1p(u);
        return std::pow(l, p) + (u > 0.0 ? p * u * std::pow(l, p - 1.0) / (1.0 + u) : 0.0);
    };
    return Nonlinearity(std::move(impl));
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> f, std::function<double(double)> df,
                                  std::optional<std::function<double(double)>> primitive,
                                  std::optional<double> rv_index, std::string name) {
    if (!f || !df) {
        throw ConfigError("custom nonlinearity needs f and an analytic f'");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = NonlinearityKind::custom;
    impl->rv_index = rv_index;
    impl->name = std::move(name);
    impl->f = std::move(f);
    impl->df = std::move(df);
    if (primitive) {
        impl->closed_primitive = std::move(*primitive);
    }
    return Nonlinearity(std::move(impl));
}

double Nonlinearity::primitive(double u) const {
    if (u <= 0.0) {
        return 0.0;
    }
    if (impl_->closed_primitive) {
        return impl_->closed_primitive(u);
    }
    const auto& f = impl_->f;
    const auto& table = impl_->table;
    const double node0 = std::ldexp(1.0, kTableMinExp);
    if (u < node0) {
        return quad::integrate_or_throw([&](double s) { return f(s); }, 0.0, u, kPrimitiveQuad);
    }
    int exponent = 0;
    std::frexp(u, &exponent);  // u in [2^(exponent-1), 2^exponent)
    const auto index = static_cast<std::size_t>(exponent - 1 - kTableMinExp);
    if (index >= table.size()) {
        return std::numeric_limits<double>::infinity();
    }
    const double base = std::ldexp(1.0, exponent - 1);
    const double rest = quad::integrate_or_throw([&](double s) { return f(s); }, base, u, kPrimitiveQuad);
    return table[index] + rest;
}

std::optional<double> Nonlinearity::rho() const {
    if (impl_->rv_index && *impl_->rv_index > 1.0) {
        return *impl_->rv_index - 1.0;
    }
    return std::nullopt;
}

bool Nonlinearity::satisfies_h1() const {
    if (impl_->kind != NonlinearityKind::exponential && impl_->f(0.0) != 0.0) {
        return false;
    }
    for (double u : geometric_grid(1e-6, 1e6, 121)) {
        if (!(impl_->f(u) > 0.0)) {
            return false;
        }
    }
    return true;
}

bool Nonlinearity::is_nondecreasing_sampled() const {
    double prev = impl_->f(0.0);
    for (double u : geometric_grid(1e-6, 1e6, 241)) {
        const double v = impl_->f(u);
        if (v < prev) {
            return false;
        }
        prev = v;
    }
    return true;
}

double primitive_F(const Nonlinearity& f, double u) {
    if (!(u >= 0.0) || !std::isfinite(u)) {
        throw DomainError("primitive_F: u must be finite and nonnegative");
    }
    return f.primitive(u);
}

std::string to_string(KoClass c) {
    switch (c) {
        case KoClass::holds:
            return "holds";
        case KoClass::fails:
            return "fails";
        case KoClass::inconclusive:
            return "inconclusive";
    }
    return "inconclusive";
}

namespace {

double inverse_sqrt_primitive(const Nonlinearity& f, double u) {
    const double big_f = f.primitive(u);
    if (!(big_f > 0.0)) {
        std::ostringstream msg;
        msg << "F(" << u << ") = " << big_f << " vanishes for u > 0";
        throw InvalidFunctionError(msg.str());
    }
    return 1.0 / std::sqrt(big_f);  // 0 once F overflows
}

}  // namespace

KoDiagnostic keller_osserman(const Nonlinearity& f) {
    constexpr int kPanels = 200;
    constexpr int kWindow = 5;
    constexpr double kRatioBound = 0.9;
    constexpr double kFloorFraction = 0.5;
    KoDiagnostic diag;
    const quad::Options opts{0.0, 1e-10, 4000};
    for (int n = 0; n < kPanels; ++n) {
        const double lo = std::ldexp(1.0, n);
        const double sum = quad::integrate_or_throw(
            [&](double u) { return inverse_sqrt_primitive(f, u); }, lo, 2.0 * lo, opts);
        diag.panel_sums.push_back(sum);
        if (sum == 0.0) {
            break;  // F overflowed: the remaining tail is numerically zero
        }
    }
    const auto& s = diag.panel_sums;
    const std::size_t n = s.size();
    if (n < kWindow + 1) {
        diag.rule = "none";
        return diag;
    }
    bool ratios_small = true;
    bool bounded_below = true;
    for (std::size_t i = n - kWindow; i < n; ++i) {
        if (!(s[i] < kRatioBound * s[i - 1])) {
            ratios_small = false;
        }
        if (!(s[i] > kFloorFraction * s.front())) {
            bounded_below = false;
        }
    }
    if (ratios_small) {
        diag.classification = KoClass::holds;
        diag.rule = "geometric-ratio";
        return diag;
    }
    if (bounded_below) {
        diag.classification = KoClass::fails;
        diag.rule = "bounded-below";
        return diag;
    }
    // Panel sums that decay like n^-beta (logarithmic factors in f) are
    // summable iff beta > 1.
    constexpr std::size_t kFit = 40;
    if (n >= kFit + 10) {
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = n - kFit; i < n; ++i) {
            x.push_back(std::log(static_cast<double>(i) + 0.5));
            y.push_back(std::log(s[i]));
        }
        const double beta = -limits::polyfit(x, y, 1)[1];
        diag.log_tail_exponent = beta;
        diag.rule = "log-tail";
        if (beta > 1.1) {
            diag.classification = KoClass::holds;
        } else if (beta < 1.0) {
            diag.classification = KoClass::fails;
        }
        return diag;
    }
    diag.rule = "none";
    return diag;
}

H4Check check_h4(const Nonlinearity& f, double p, std::span<const double> grid) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("check_h4: need 0 < p < 1");
    }
    H4Check out;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double g0 = f(grid[i]) / std::pow(grid[i], p);
        const double g1 = f(grid[i + 1]) / std::pow(grid[i + 1], p);
        if (!(g1 > g0)) {
            out.increasing = false;
            out.violation = std::make_pair(grid[i], grid[i + 1]);
            break;
        }
    }
    return out;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw DomainError("geometric_grid: need 0 < lo < hi and n >= 2");
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    }
    out.back() = hi;
    return out;
}

double phi_tail(const Nonlinearity& f, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError("phi_tail: need finite v > 0");
    }
    switch (f.kind()) {
        case NonlinearityKind::power: {
            const double q = f.parameter();
            if (!(q > 1.0)) {
                throw KellerOssermanError("phi_tail: u^q with q <= 1 has a divergent tail");
            }
            return 2.0 * std::sqrt(q + 1.0) / ((q - 1.0) * std::pow(v, 0.5 * (q - 1.0)));
        }
        case NonlinearityKind::exponential:
            // w = sqrt(e^s - 1) turns the integrand into 2/(1 + w^2).
            return 2.0 * std::atan(1.0 / std::sqrt(std::expm1(v)));
        default:
            break;
    }
    const quad::Options opts{0.0, 1e-13, 4000};
    auto integrand = [&](double s) { return inverse_sqrt_primitive(f, s); };
    double total = 0.0;
    int negligible = 0;
    double end = v;
    for (int n = 0; n < 1500; ++n) {
        const double hi = 2.0 * end;
        if (!std::isfinite(f.primitive(hi))) {
            break;
        }
        const double piece = quad::integrate_or_throw(integrand, end, hi, opts);
        total += piece;
        end = hi;
        negligible = piece < 1e-17 * total ? negligible + 1 : 0;
        if (negligible >= 3) {
            return total;
        }
    }
    // Analytic continuation past `end` from the local decay of 1/sqrt(F).
    const double i_end = integrand(end);
    if (i_end == 0.0) {
        return total;
    }
    const double decay = std::log2(integrand(0.5 * end) / i_end);
    if (decay > 1.05) {
        return total + end * i_end / (decay - 1.0);  // Karamata tail for RV integrands
    }
    // 1/sqrt(F) ~ C / (s ln^beta s): tail = s I(s) ln s / (beta - 1).
    const double log_end = std::log(end);
    const double beta = (decay - 1.0) / std::log2(log_end / std::log(0.5 * end));
    if (!(beta > 1.0)) {
        throw KellerOssermanError("phi_tail: tail of 1/sqrt(F) is not integrable");
    }
    return total + end * i_end * log_end / (beta - 1.0);
}

GurtinMacCamy gurtin_maccamy_transform(double m) {
    if (!(m > 1.0)) {
        throw DomainError("gurtin_maccamy_transform: need m > 1");
    }
    GurtinMacCamy out;
    out.p = 1.0 / m;
    out.q = 2.0 / m;
    out.superlinear_admissible = m < 2.0;
    return out;
}

}  // namespace blowup
