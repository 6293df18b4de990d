#pragma once

// Sequence-limit extraction shared by the Karamata, profile and rate modules.

#include <span>
#include <vector>

namespace blowup::limits {

struct Estimate {
    double value = 0.0;
    bool stabilized = false;
    /// Largest pairwise distance among the last three accelerated terms.
    double spread = 0.0;
    std::vector<double> accelerated;
};

/// Aitken delta-squared transform of a sequence; terms whose second
/// difference vanishes are passed through unchanged.
std::vector<double> aitken(std::span<const double> seq);

/// Limit of a sequence sampled on a geometric ladder (ratio 2). Stabilized
/// when the last three accelerated values agree within
/// rel_tol * max(1, |value|).
Estimate geometric_limit(std::span<const double> seq, double rel_tol = 1e-6);

/// Least-squares polynomial fit y ~ sum c_k x^k of the given degree; returns
/// the coefficients c_0..c_degree.
std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree,
                            std::span<const double> weights = {});

/// Value at x = 0 of the least-squares polynomial through (x, y).
double extrapolate_to_zero(std::span<const double> x, std::span<const double> y, int degree);

}  // namespace blowup::limits
