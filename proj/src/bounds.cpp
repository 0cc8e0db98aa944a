#include "pairorth/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pairorth/errors.hpp"

namespace pairorth {
namespace {

void require_dimension(int n) {
    if (n < 2) throw UsageError("dimension must be at least 2, got " + std::to_string(n));
}

std::uint64_t to_step_count(double steps) {
    if (!(steps < 0x1p63)) throw DomainError("step count exceeds 2^63");
    return static_cast<std::uint64_t>(steps);
}

}  // namespace

double inflection_threshold(int n) {
    require_dimension(n);
    return std::numbers::ln2 / 2.0 * n;
}

BoundParams BoundParams::for_dimension(int n) {
    require_dimension(n);
    const double nd = n;
    const double ln2 = std::numbers::ln2;
    return BoundParams{n, 2.0 * ln2 * ln2 * nd * nd * (nd - 1) * (nd - 1), inflection_threshold(n)};
}

ConvergenceTarget::ConvergenceTarget(double eps_, double delta_) : eps(eps_), delta(delta_) {
    if (!(eps > 0.0 && eps < 1.0)) throw UsageError("eps must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0, 1)");
}

double f_map(double x, int n) {
    require_dimension(n);
    if (!(x >= 0.0)) throw UsageError("f_map: x must be non-negative");
    const double gap = -std::expm1(-2.0 * x / n);
    const double m = n - 1;
    return x - gap * gap / (2.0 * m * m);
}

double theorem7_bound(double phi0, int n, double t) {
    const auto p = BoundParams::for_dimension(n);
    if (!(phi0 >= 0.0)) throw UsageError("theorem7_bound: phi0 must be non-negative");
    if (!(t >= 0.0)) throw UsageError("theorem7_bound: t must be non-negative");
    if (phi0 < p.inflection) {
        return p.c_n / (p.c_n + phi0 * t) * phi0;
    }
    const double nd = n;
    const double n3 = nd * nd * nd;
    const double tail = nd * n3 / (2.0 / std::numbers::ln2 * n3 + 0.5 * t);
    return tail + (phi0 - tail) * std::exp(-t / (p.decay_const * nd * nd * phi0));
}

KappaBounds kappa_bounds_from_phi(double phi, int n) {
    require_dimension(n);
    if (!(phi >= 0.0)) throw UsageError("kappa_bounds_from_phi: phi must be non-negative");
    KappaBounds b{std::exp(phi / n), n * std::exp(phi), std::nullopt};
    if (2.0 * phi < 1.0) {
        const double r = std::sqrt(2.0 * phi);
        b.upper_tight = (1.0 + r) / (1.0 - r);
    }
    return b;
}

double stopping_scale(double phi0, int n) {
    require_dimension(n);
    const double m = n - 1;
    return 16.0 * m * m * phi0;
}

StoppingTail stopping_tail(double phi0, int n, int c) {
    if (!(phi0 > 0.0)) throw UsageError("stopping_tail: phi0 must be positive");
    if (c < 1) throw UsageError("stopping_tail: c must be a positive integer");
    return {to_step_count(ceil_tolerant(c * stopping_scale(phi0, n))), std::exp2(-c)};
}

double prop_a0_bound(double phi0, int n, double t) {
    const auto p = BoundParams::for_dimension(n);
    if (!(phi0 >= p.inflection)) {
        throw DomainError("prop_a0_bound: requires phi0 >= (log 2 / 2) n = " +
                          std::to_string(p.inflection));
    }
    const double nd = n;
    if (!(t >= 0.0)) throw DomainError("prop_a0_bound: requires t >= 0");
    if (!(t <= nd * nd * phi0)) throw DomainError("prop_a0_bound: requires t <= n^2 phi0");
    return std::log(nd) + phi0 - (1.0 / p.prop_const) * (1.0 - p.inflection / phi0) * t / (nd * nd);
}

std::uint64_t theorem1_steps(double phi0, int n, const ConvergenceTarget& target) {
    const auto p = BoundParams::for_dimension(n);
    if (!(phi0 > 0.0)) throw UsageError("theorem1_steps: phi0 must be positive");
    const double nd = n;
    const double log_term = std::log(7.0 * phi0 / nd);
    const double first = log_term > 0.0 ? p.thm1_c1 * nd * nd * phi0 * log_term : 0.0;
    const double second =
        p.thm1_c2 * nd * nd * nd * nd / (target.delta * target.eps * target.eps);
    return to_step_count(ceil_tolerant(std::max(first, second)));
}

double ceil_tolerant(double x) {
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, std::abs(x))) return nearest;
    return std::ceil(x);
}

}  // namespace pairorth
