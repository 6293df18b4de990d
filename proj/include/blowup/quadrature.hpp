#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//
// Global subdivision: the panel with the largest error estimate is bisected
// until the total estimate meets max(abs_tol, rel_tol * |I|). Nodes never
// touch the endpoints, so integrable endpoint singularities and functions
// undefined at the endpoints are fine.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <sstream>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup::quad {

struct Options {
    double abs_tol = 0.0;
    double rel_tol = 1e-12;
    int max_panels = 4000;
};

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel kronrod15(F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[static_cast<std::size_t>(j)];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
        if (j % 2 == 1) {
            gauss += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    if (!std::isfinite(kronrod)) {
        std::ostringstream msg;
        msg << "quadrature: non-finite integrand on [" << lo << ", " << hi << "]";
        throw NumericError(msg.str());
    }
    return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Integrates f over [lo, hi]. Throws NumericError if the integrand is not finite.
template <class F>
Result integrate(F&& f, double lo, double hi, const Options& opts = {}) {
    Result out;
    if (lo == hi) {
        out.converged = true;
        return out;
    }
    double sign = 1.0;
    if (hi < lo) {
        std::swap(lo, hi);
        sign = -1.0;
    }
    std::priority_queue<detail::Panel> panels;
    panels.push(detail::kronrod15(f, lo, hi));
    double total = panels.top().value;
    double error = panels.top().error;
    out.evaluations = 15;
    while (true) {
        const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
        if (error <= target) {
            out.converged = true;
            break;
        }
        if (static_cast<int>(panels.size()) >= opts.max_panels) {
            break;
        }
        const detail::Panel worst = panels.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Panel at floating-point resolution; accept what we have.
            out.converged = error <= 1e3 * target;
            break;
        }
        panels.pop();
        const detail::Panel left = detail::kronrod15(f, worst.lo, mid);
        const detail::Panel right = detail::kronrod15(f, mid, worst.hi);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    double sum = 0.0;
    double err = 0.0;
    while (!panels.empty()) {
        sum += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    out.value = sign * sum;
    out.abs_error = err;
    return out;
}

/// Like integrate, but throws NumericError when the tolerance is not met.
template <class F>
double integrate_or_throw(F&& f, double lo, double hi, const Options& opts = {}) {
    Result r = integrate(f, lo, hi, opts);
    if (!r.converged) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << lo << ", " << hi << "], error estimate "
            << r.abs_error;
        throw NumericError(msg.str());
    }
    return r.value;
}

}  // namespace blowup::quad
