#include "blowup/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace blowup::limits {

std::vector<double> aitken(std::span<const double> seq) {
    std::vector<double> out;
    if (seq.size() < 3) {
        out.assign(seq.begin(), seq.end());
        return out;
    }
    out.reserve(seq.size() - 2);
    for (std::size_t n = 0; n + 2 < seq.size(); ++n) {
        const double d1 = seq[n + 1] - seq[n];
        const double d2 = seq[n + 2] - 2.0 * seq[n + 1] + seq[n];
        const double scale = std::max({std::abs(seq[n]), std::abs(seq[n + 1]), std::abs(seq[n + 2])});
        if (std::abs(d2) <= 1e-14 * scale || !std::isfinite(d1 * d1 / d2)) {
            out.push_back(seq[n + 2]);
        } else {
            out.push_back(seq[n + 2] - (seq[n + 2] - seq[n + 1]) * (seq[n + 2] - seq[n + 1]) /
                                           (seq[n + 2] - 2.0 * seq[n + 1] + seq[n]));
        }
    }
    return out;
}

Estimate geometric_limit(std::span<const double> seq, double rel_tol) {
    Estimate est;
    if (seq.empty()) {
        throw std::invalid_argument("geometric_limit: empty sequence");
    }
    est.accelerated = aitken(seq);
    const auto& acc = est.accelerated;
    est.value = acc.back();
    if (acc.size() < 3) {
        est.spread = acc.size() > 1 ? std::abs(acc[acc.size() - 1] - acc[acc.size() - 2]) : 0.0;
        est.stabilized = false;
        return est;
    }
    const double a = acc[acc.size() - 3];
    const double b = acc[acc.size() - 2];
    const double c = acc[acc.size() - 1];
    est.spread = std::max({std::abs(a - b), std::abs(b - c), std::abs(a - c)});
    est.stabilized = est.spread <= rel_tol * std::max(1.0, std::abs(c));
    return est;
}

std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree,
                            std::span<const double> weights) {
    if (x.size() != y.size() || degree < 0 || x.size() < static_cast<std::size_t>(degree + 1)) {
        throw std::invalid_argument("polyfit: need at least degree+1 matching samples");
    }
    const auto m = static_cast<std::size_t>(degree + 1);
    // Normal equations on a centred/scaled abscissa, solved by Gaussian
    // elimination with partial pivoting; then mapped back to powers of x.
    double lo = *std::min_element(x.begin(), x.end());
    double hi = *std::max_element(x.begin(), x.end());
    const double mid = 0.5 * (lo + hi);
    const double half = hi > lo ? 0.5 * (hi - lo) : 1.0;
    std::vector<double> ata(m * m, 0.0);
    std::vector<double> aty(m, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double s = (x[i] - mid) / half;
        std::vector<double> powers(m, 1.0);
        for (std::size_t k = 1; k < m; ++k) {
            powers[k] = powers[k - 1] * s;
        }
        for (std::size_t r = 0; r < m; ++r) {
            aty[r] += w * powers[r] * y[i];
            for (std::size_t c = 0; c < m; ++c) {
                ata[r * m + c] += w * powers[r] * powers[c];
            }
        }
    }
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(ata[r * m + col]) > std::abs(ata[piv * m + col])) {
                piv = r;
            }
        }
        if (ata[piv * m + col] == 0.0) {
            throw std::runtime_error("polyfit: singular normal equations");
        }
        if (piv != col) {
            for (std::size_t c = 0; c < m; ++c) {
                std::swap(ata[col * m + c], ata[piv * m + c]);
            }
            std::swap(aty[col], aty[piv]);
        }
        for (std::size_t r = col + 1; r < m; ++r) {
            const double factor = ata[r * m + col] / ata[col * m + col];
            for (std::size_t c = col; c < m; ++c) {
                ata[r * m + c] -= factor * ata[col * m + c];
            }
            aty[r] -= factor * aty[col];
        }
    }
    std::vector<double> scaled(m, 0.0);
    for (std::size_t r = m; r-- > 0;) {
        double acc = aty[r];
        for (std::size_t c = r + 1; c < m; ++c) {
            acc -= ata[r * m + c] * scaled[c];
        }
        scaled[r] = acc / ata[r * m + r];
    }
    // Expand sum_k scaled_k ((x - mid)/half)^k into powers of x.
    std::vector<double> coeffs(m, 0.0);
    std::vector<double> basis(m, 0.0);
    basis[0] = 1.0;  // coefficients of ((x - mid)/half)^k, updated per k
    for (std::size_t k = 0; k < m; ++k) {
        if (k > 0) {
            std::vector<double> next(m, 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                if (basis[j] == 0.0) {
                    continue;
                }
                if (j + 1 < m) {
                    next[j + 1] += basis[j] / half;
                }
                next[j] -= basis[j] * mid / half;
            }
            basis = next;
        }
        for (std::size_t j = 0; j < m; ++j) {
            coeffs[j] += scaled[k] * basis[j];
        }
    }
    return coeffs;
}

double extrapolate_to_zero(std::span<const double> x, std::span<const double> y, int degree) {
    return polyfit(x, y, degree).front();
}

}  // namespace blowup::limits
