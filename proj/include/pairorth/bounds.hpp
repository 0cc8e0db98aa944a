#pragma once

#include <cstdint>
#include <optional>

namespace pairorth {

/**
 * Dimension-dependent constants of the convergence analysis.
 *
 *  - `c_n = 2 (log 2)^2 n^2 (n-1)^2`, the rate constant once the potential is
 *    below the inflection threshold.
 *  - `inflection = (log 2 / 2) n`, where the iterative map changes convexity.
 *  - The remaining members are the fixed numeric constants of the stated bounds.
 */
struct BoundParams {
    int n;
    double c_n;
    double inflection;
    double decay_const = 47.0;
    double prop_const = 96.0;
    double thm1_c1 = 200.0;
    double thm1_c2 = 48.0;

    static BoundParams for_dimension(int n);
};

double inflection_threshold(int n);

/// Target accuracy for kappa(A_t) <= 1 + eps with probability 1 - delta.
struct ConvergenceTarget {
    double eps;
    double delta;

    ConvergenceTarget(double eps, double delta);

    /// True when both parameters lie in (0, 0.01), the regime the step counts are stated for.
    bool in_stated_regime() const noexcept { return eps < 0.01 && delta < 0.01; }
};

/// f(x) = x - (1 - exp(-2x/n))^2 / (2 (n-1)^2). Throws UsageError for x < 0 or n < 2.
double f_map(double x, int n);

/// Upper bound on E(phi_t) given phi_0. Below the inflection threshold:
/// c_n phi0 / (c_n + phi0 t). At or above it:
/// T + (phi0 - T) exp(-t / (47 n^2 phi0)) with T = n^4 / ((2/log 2) n^3 + t/2).
double theorem7_bound(double phi0, int n, double t);

struct KappaBounds {
    double lower;                       // exp(phi / n)
    double upper_loose;                 // n exp(phi)
    std::optional<double> upper_tight;  // (1 + sqrt(2 phi)) / (1 - sqrt(2 phi)) when 2 phi < 1
};

KappaBounds kappa_bounds_from_phi(double phi, int n);

/// Pr(t* > c * 16 (n-1)^2 phi0) <= 2^{-c}.
struct StoppingTail {
    std::uint64_t threshold_steps;  // ceil(c * 16 (n-1)^2 phi0)
    double tail_prob;               // 2^{-c}
};

StoppingTail stopping_tail(double phi0, int n, int c);

/// mu = 16 (n-1)^2 phi0.
double stopping_scale(double phi0, int n);

/// Bound on E log kappa(A_t) while the potential is large:
/// log n + phi0 - (1/96)(1 - inflection/phi0) t / n^2.
/// Requires phi0 >= inflection(n) and t <= n^2 phi0; throws DomainError otherwise.
double prop_a0_bound(double phi0, int n, double t);

/// Steps after which Pr(kappa(A_t) >= 1 + eps) <= delta:
/// ceil(max(200 n^2 phi0 log(7 phi0 / n), 48 n^4 / (delta eps^2))), the first
/// term clamped to zero when its logarithm is non-positive.
std::uint64_t theorem1_steps(double phi0, int n, const ConvergenceTarget& target);

/// ceil() that treats values within 1e-12 relative of an integer as that integer.
double ceil_tolerant(double x);

}  // namespace pairorth
