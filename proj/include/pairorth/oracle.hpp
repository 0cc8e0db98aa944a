#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

#include "pairorth/matrix.hpp"

// Slow, independent reference computations. Nothing in the production paths
// calls into this header.

namespace pairorth::oracle {

struct OneStepExpectation {
    double mean;             // average Phi over every successor state
    std::size_t successors;  // number of successor states enumerated, n(n-1)
};

/// E Phi(orth(A, i, j)) over a uniformly random ordered pair, by enumerating
/// all n(n-1) pairs. Limited to n <= 8.
template <FieldScalar T>
OneStepExpectation exact_one_step_expectation(const ColumnMatrix<T>& a);

/// d_j by modified Gram-Schmidt (with a re-orthogonalization pass) over the
/// other columns, then the norm of the residual of column j.
template <FieldScalar T>
double brute_force_distance(const ColumnMatrix<T>& a, std::size_t j);

/// Check of the per-step distance inequalities for A' = orth(A, i, j):
///   d_k(A') >= d_k(A) for all k, and d_i(A') >= d_i(A) / sqrt(1 - |<a_i, a_j>|^2).
struct Lemma3Report {
    Eigen::VectorXd d_before;
    Eigen::VectorXd d_after;
    double inner_abs = 0.0;
    double monotone_margin = 0.0;  // min_k d_k(A') - d_k(A)
    double ratio_margin = 0.0;     // d_i(A') - d_i(A) / sqrt(1 - |<a_i, a_j>|^2)
    double phi_before = 0.0;
    double phi_after = 0.0;
    bool pass = false;             // both margins >= -1e-10
};

template <FieldScalar T>
Lemma3Report verify_lemma3(const ColumnMatrix<T>& a, PairIndex pair);

enum class BoundId {
    c_n,
    inflection,
    f_map,
    theorem7,
    kappa_lower,
    kappa_upper_loose,
    kappa_upper_tight,
    stopping_threshold,
    stopping_tail_prob,
    prop_a0,
    theorem1_steps,
};

BoundId parse_bound_id(std::string_view name);

struct BoundArgs {
    double x = 0.0;  // x, phi or phi0 depending on the bound
    int n = 2;
    double t = 0.0;
    int c = 1;
    double eps = 0.01;
    double delta = 0.01;
};

/// Re-evaluates a bounds-module formula with 50 significant decimal digits and
/// rounds the result to double.
double highprec_bound_reference(BoundId id, const BoundArgs& args);

}  // namespace pairorth::oracle
