#pragma once

#include <array>
#include <string_view>

#include <Eigen/Dense>

#include "pairorth/matrix.hpp"

namespace pairorth {

enum class DistanceMethod {
    projection,    // residual against an orthonormal basis of the other columns
    inverse_rows,  // 1 / ||row j of A^{-1}||
    automatic,     // inverse_rows, switching to projection above an estimated kappa of 1e8
};

/// Diagnostics for one matrix state.
struct MetricsSnapshot {
    Eigen::VectorXd d;      // leave-one-out distances, each in (0, 1]
    double phi = 0.0;       // -sum_j log d_j
    Eigen::VectorXd sigma;  // singular values, descending
    double kappa = 1.0;
    double gram_offdiag = 0.0;
};

/// d_j = dist(a_j, span{a_k : k != j}). Throws SingularityError naming j when
/// a distance cannot be resolved.
template <FieldScalar T>
Eigen::VectorXd leave_one_out_distances(const ColumnMatrix<T>& a,
                                        DistanceMethod method = DistanceMethod::automatic);

/// Phi(A) = -sum_j log d_j(A), accumulated term by term in the log domain.
template <FieldScalar T>
double potential_phi(const ColumnMatrix<T>& a);

struct ConditionNumber {
    double kappa;
    Eigen::VectorXd sigma;  // descending
};

/// kappa = sigma_1 / sigma_n from a dense SVD.
template <FieldScalar T>
ConditionNumber condition_number(const ColumnMatrix<T>& a);

template <FieldScalar T>
MetricsSnapshot snapshot(const ColumnMatrix<T>& a);

// Determinant and norm inequalities relating A and A^{-1} to Phi:
//   |det A| <= 1,  |det A^{-1}| <= exp(Phi),  ||A|| <= sqrt(n),  ||A^{-1}|| <= sqrt(n) exp(Phi).
// Comparisons are made on logarithms so that large Phi does not overflow.
struct InequalityCheck {
    std::string_view name;
    double value;
    double bound;
    double log_value;
    double log_bound;
    bool holds;
};

struct HadamardReport {
    double phi;
    std::array<InequalityCheck, 4> checks;

    bool all_hold() const noexcept;
};

template <FieldScalar T>
HadamardReport hadamard_report(const ColumnMatrix<T>& a);

}  // namespace pairorth
