#pragma once

// The boundary blow-up profile h, defined by
//
//     int_{h(t)}^inf ds / sqrt(F(s)) = sqrt(2) int_0^t k(s) ds,
//
// together with the rate constant xi0 = ((2 + rho l1) / ((2 + rho) c))^(1/rho)
// and the limit diagnostics used when bracketing solutions near the boundary.

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "blowup/karamata.hpp"
#include "blowup/nonlinearity.hpp"

namespace blowup {

/// Immutable profile for a given (f, k, c). Construction validates rho > 1e-3,
/// reads l1 from the weight and locates a convexity window.
class BlowupProfile {
public:
    BlowupProfile(Nonlinearity f, KWeight k, double c);

    [[nodiscard]] const Nonlinearity& f() const { return f_; }
    [[nodiscard]] const KWeight& k() const { return k_; }
    [[nodiscard]] double c() const { return c_; }
    [[nodiscard]] double rho() const { return rho_; }
    [[nodiscard]] double ell1() const { return ell1_; }
    [[nodiscard]] double xi0() const { return xi0_; }
    [[nodiscard]] double convexity_delta() const { return convexity_delta_; }
    /// phi(0+); +inf when every t < nu is admissible.
    [[nodiscard]] double phi_at_zero() const { return phi_zero_; }
    /// Supremum of admissible t: min(nu, largest t with sqrt(2) K(t) < phi(0+)).
    [[nodiscard]] double t_max() const { return t_max_; }

private:
    Nonlinearity f_;
    KWeight k_;
    double c_;
    double rho_;
    double ell1_;
    double xi0_;
    double phi_zero_;
    double t_max_;
    double convexity_delta_ = 0.0;
};

/// h(t): the unique root of phi(h) = sqrt(2) K(t); relative residual < 1e-10.
double compute_h(const BlowupProfile& profile, double t);

struct HDerivatives {
    double first = 0.0;
    double second = 0.0;
};

/// h' = -sqrt(2) k sqrt(F(h)),  h'' = k^2 f(h) - sqrt(2) k' sqrt(F(h)).
HDerivatives h_derivatives(const BlowupProfile& profile, double t);

double xi0(double rho, double ell1, double c);

struct XiBracket {
    double minus = 0.0;  // uses c + 2 eps
    double plus = 0.0;   // uses c - 2 eps
};

/// xi^(+/-) = ((2 + rho l1) / ((c -/+ 2 eps)(2 + rho)))^(1/rho); requires 0 < 2 eps < c.
XiBracket xi_pm(double rho, double ell1, double c, double eps);

struct HLimitReport {
    double estimate = 0.0;
    double target = 0.0;
    bool converged = false;
    std::vector<double> ratios;       // h''/(k^2 f(h xi)) along the sequence
    std::vector<double> h_over_h2;    // h/h''
    std::vector<double> h1_over_h2;   // h'/h''
};

/// Evaluates h''(t) / (k^2(t) f(xi h(t))) along a decreasing t sequence and
/// extrapolates; target = (2 + rho l1) / ((2 + rho) xi^(1+rho)).
HLimitReport verify_h_limit(const BlowupProfile& profile, double xi, std::span<const double> t_sequence);

/// Largest dyadic delta = t_cap / 2^j (t_cap = min(nu, t_max)/2) such that
/// h'' > 0 on a geometric test grid in (0, delta]. `grid_points` controls the
/// test grid density. Throws DomainError if no scale works.
double convexity_window(const BlowupProfile& profile, int grid_points = 64);

/// Samples (t, h(t)) at `per_decade` points per decade on [t_lo, t_hi].
std::vector<std::pair<double, double>> tabulate_profile(const BlowupProfile& profile, double t_lo,
                                                        double t_hi, int per_decade = 64);

/// Two columns "t h", one pair per line, round-trip precision.
void write_profile(std::ostream& out, std::span<const std::pair<double, double>> table);

}  // namespace blowup
