#include "blowup/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <locale>
#include <numbers>
#include <ostream>
#include <sstream>

#include "blowup/errors.hpp"
#include "blowup/limits.hpp"

namespace blowup {

namespace {

constexpr double kMinRho = 1e-3;
constexpr double kMaxLogH = 700.0;

double phi_zero_for(const Nonlinearity& f) {
    switch (f.kind()) {
        case NonlinearityKind::power:
        case NonlinearityKind::power_log:
        case NonlinearityKind::log_power:
            // 1/sqrt(F) is not integrable at 0 for these families.
            return std::numeric_limits<double>::infinity();
        case NonlinearityKind::exponential:
            return std::numbers::pi;
        case NonlinearityKind::custom:
            break;
    }
    return phi_tail(f, 1e-12);
}

}  // namespace

BlowupProfile::BlowupProfile(Nonlinearity f, KWeight k, double c)
    : f_(std::move(f)), k_(std::move(k)), c_(c) {
    if (!(c_ > 0.0)) {
        throw DomainError("BlowupProfile: potential amplitude c must be positive");
    }
    const auto rho = f_.rho();
    if (!rho || *rho < kMinRho) {
        throw DomainError("BlowupProfile: f must be regularly varying with index rho + 1, rho >= 1e-3");
    }
    rho_ = *rho;
    ell1_ = k_.ell1();
    xi0_ = blowup::xi0(rho_, ell1_, c_);
    phi_zero_ = phi_zero_for(f_);
    const double nu = std::isfinite(k_.nu()) ? k_.nu() : 1.0;
    t_max_ = nu;
    if (std::isfinite(phi_zero_) && std::sqrt(2.0) * k_.primitive(nu) >= phi_zero_) {
        double lo = 0.0;
        double hi = nu;
        for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (std::sqrt(2.0) * k_.primitive(mid) < phi_zero_ ? lo : hi) = mid;
        }
        t_max_ = lo;
    }
    convexity_delta_ = convexity_window(*this);
}

double compute_h(const BlowupProfile& profile, double t) {
    if (!(t > 0.0) || !(t < profile.t_max())) {
        std::ostringstream msg;
        msg << "compute_h: t = " << t << " outside the profile domain (0, " << profile.t_max() << ")";
        throw DomainError(msg.str());
    }
    const double target = std::sqrt(2.0) * profile.k().primitive(t);
    if (!(target > 0.0) || target >= profile.phi_at_zero()) {
        throw DomainError("compute_h: sqrt(2) K(t) is not inside (0, phi(0+))");
    }
    const double log_target = std::log(target);
    const Nonlinearity& f = profile.f();
    // g is strictly decreasing in y = ln h.
    auto g = [&](double y) { return std::log(phi_tail(f, std::exp(y))) - log_target; };

    double y_lo = 0.0;
    double y_hi = 0.0;
    double g_lo = g(0.0);
    double g_hi = g_lo;
    double step = 1.0;
    if (g_lo > 0.0) {
        while (g_hi > 0.0) {
            y_lo = y_hi;
            g_lo = g_hi;
            if (y_hi >= kMaxLogH) {
                throw DomainError("compute_h: h(t) exceeds the double range");
            }
            y_hi = std::min(y_hi + step, kMaxLogH);
            step *= 2.0;
            g_hi = g(y_hi);
        }
    } else {
        while (g_lo < 0.0) {
            y_hi = y_lo;
            g_hi = g_lo;
            if (y_lo <= -kMaxLogH) {
                throw DomainError("compute_h: h(t) is below the double range");
            }
            y_lo = std::max(y_lo - step, -kMaxLogH);
            step *= 2.0;
            g_lo = g(y_lo);
        }
    }
    if (g_lo == 0.0) {
        return std::exp(y_lo);
    }
    if (g_hi == 0.0) {
        return std::exp(y_hi);
    }
    // Illinois false position, bisecting when the interpolant stalls.
    int side = 0;
    double y = 0.5 * (y_lo + y_hi);
    for (int iter = 0; iter < 300; ++iter) {
        y = (y_lo * g_hi - y_hi * g_lo) / (g_hi - g_lo);
        if (!(y > y_lo && y < y_hi)) {
            y = 0.5 * (y_lo + y_hi);
        }
        const double gy = g(y);
        if (std::abs(gy) < 1e-14 || y_hi - y_lo < 4e-16 * std::max(1.0, std::abs(y))) {
            return std::exp(y);
        }
        if (gy > 0.0) {
            y_lo = y;
            g_lo = gy;
            if (side == -1) {
                g_hi *= 0.5;
            }
            side = -1;
        } else {
            y_hi = y;
            g_hi = gy;
            if (side == 1) {
                g_lo *= 0.5;
            }
            side = 1;
        }
    }
    throw NumericError("compute_h: root finder did not converge");
}

HDerivatives h_derivatives(const BlowupProfile& profile, double t) {
    const double h = compute_h(profile, t);
    const double root_f = std::sqrt(profile.f().primitive(h));
    const double kt = profile.k()(t);
    HDerivatives d;
    d.first = -std::sqrt(2.0) * kt * root_f;
    d.second = kt * kt * profile.f()(h) - std::sqrt(2.0) * profile.k().derivative(t) * root_f;
    return d;
}

double xi0(double rho, double ell1, double c) {
    if (!(rho > 0.0)) {
        throw DomainError("xi0: rho must be positive");
    }
    if (!(c > 0.0) || !(ell1 >= 0.0 && ell1 <= 1.0)) {
        throw DomainError("xi0: need c > 0 and l1 in [0, 1]");
    }
    return std::pow((2.0 + rho * ell1) / ((2.0 + rho) * c), 1.0 / rho);
}

XiBracket xi_pm(double rho, double ell1, double c, double eps) {
    if (!(rho > 0.0) || !(c > 0.0)) {
        throw DomainError("xi_pm: need rho > 0 and c > 0");
    }
    if (!(eps > 0.0) || !(2.0 * eps < c)) {
        throw DomainError("xi_pm: need 0 < 2 eps < c");
    }
    const double numer = (2.0 + rho * ell1) / (2.0 + rho);
    XiBracket out;
    out.minus = std::pow(numer / (c + 2.0 * eps), 1.0 / rho);
    out.plus = std::pow(numer / (c - 2.0 * eps), 1.0 / rho);
    return out;
}

HLimitReport verify_h_limit(const BlowupProfile& profile, double xi, std::span<const double> t_sequence) {
    if (!(xi > 0.0)) {
        throw DomainError("verify_h_limit: xi must be positive");
    }
    if (t_sequence.size() < 3) {
        throw DomainError("verify_h_limit: need at least three t values");
    }
    HLimitReport report;
    const double rho = profile.rho();
    report.target = (2.0 + rho * profile.ell1()) / ((2.0 + rho) * std::pow(xi, 1.0 + rho));
    for (double t : t_sequence) {
        const double h = compute_h(profile, t);
        const HDerivatives d = h_derivatives(profile, t);
        const double kt = profile.k()(t);
        report.ratios.push_back(d.second / (kt * kt * profile.f()(xi * h)));
        report.h_over_h2.push_back(h / d.second);
        report.h1_over_h2.push_back(d.first / d.second);
    }
    const limits::Estimate est = limits::geometric_limit(report.ratios, 1e-4);
    report.estimate = est.value;
    report.converged = est.stabilized && std::isfinite(est.value);
    return report;
}

double convexity_window(const BlowupProfile& profile, int grid_points) {
    const double nu = std::isfinite(profile.k().nu()) ? profile.k().nu() : 1.0;
    const double cap = 0.5 * std::min(nu, profile.t_max());
    for (int j = 0; j <= 40; ++j) {
        const double delta = std::ldexp(cap, -j);
        int checked = 0;
        bool positive = true;
        for (double t : geometric_grid(delta * 1e-6, delta, grid_points)) {
            double second = 0.0;
            try {
                second = h_derivatives(profile, std::min(t, 0.999999 * profile.t_max())).second;
            } catch (const DomainError&) {
                continue;  // below the resolvable scale of K
            }
            if (!std::isfinite(second)) {
                continue;
            }
            ++checked;
            if (!(second > 0.0)) {
                positive = false;
                break;
            }
        }
        if (positive && checked >= 8) {
            return delta;
        }
    }
    throw DomainError("convexity_window: h'' is not positive at any tested scale");
}

std::vector<std::pair<double, double>> tabulate_profile(const BlowupProfile& profile, double t_lo,
                                                        double t_hi, int per_decade) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || per_decade < 1) {
        throw DomainError("tabulate_profile: need 0 < t_lo < t_hi and per_decade >= 1");
    }
    std::vector<std::pair<double, double>> table;
    const double decades = std::log10(t_hi / t_lo);
    const auto count = static_cast<int>(std::floor(decades * per_decade + 1e-9));
    for (int i = 0; i <= count; ++i) {
        const double t = t_lo * std::pow(10.0, static_cast<double>(i) / per_decade);
        table.emplace_back(t, compute_h(profile, t));
    }
    if (table.back().first < t_hi * (1.0 - 1e-12)) {
        table.emplace_back(t_hi, compute_h(profile, t_hi));
    } else {
        table.back() = {t_hi, compute_h(profile, t_hi)};
    }
    return table;
}

void write_profile(std::ostream& out, std::span<const std::pair<double, double>> table) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    for (const auto& [t, h] : table) {
        buf << t << ' ' << h << '\n';
    }
    out << buf.str();
}

}  // namespace blowup
