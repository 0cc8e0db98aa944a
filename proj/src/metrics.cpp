#include "pairorth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pairorth/tolerances.hpp"

namespace pairorth {
namespace {

template <FieldScalar T>
Eigen::VectorXd projection_distances(const ColumnMatrix<T>& a) {
    const auto n = static_cast<Eigen::Index>(a.dim());
    Eigen::VectorXd d(n);
    DenseMatrix<T> others(n, n - 1);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0, c = 0; k < n; ++k) {
            if (k != j) others.col(c++) = a.dense().col(k);
        }
        Eigen::HouseholderQR<DenseMatrix<T>> qr(others);
        // The last Householder coordinate spans the orthogonal complement of the others.
        DenseVector<T> coords = qr.householderQ().adjoint() * a.dense().col(j);
        const double dist = std::abs(coords(n - 1));
        if (!(dist > 0.0) || !std::isfinite(dist)) {
            throw SingularityError(static_cast<std::size_t>(j),
                                   "column " + std::to_string(j) + " lies in the span of the others");
        }
        d(j) = std::min(dist, 1.0);
    }
    return d;
}

// Row norms of A^{-1}; empty when the estimated condition number is too large
// and `allow_fallback` is set.
template <FieldScalar T>
Eigen::VectorXd inverse_row_norms(const ColumnMatrix<T>& a, bool allow_fallback) {
    Eigen::PartialPivLU<DenseMatrix<T>> lu(a.dense());
    const double rcond = lu.rcond();
    if (allow_fallback && !(rcond * tol::kInverseRowsMaxKappa > 1.0)) return {};
    const DenseMatrix<T> inv = lu.inverse();
    const auto n = inv.rows();
    Eigen::VectorXd norms(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        norms(j) = inv.row(j).norm();
        if (!std::isfinite(norms(j)) || norms(j) == 0.0) {
            throw SingularityError(static_cast<std::size_t>(j),
                                   "row " + std::to_string(j) + " of the inverse is not finite");
        }
    }
    return norms;
}

}  // namespace

template <FieldScalar T>
Eigen::VectorXd leave_one_out_distances(const ColumnMatrix<T>& a, DistanceMethod method) {
    if (method == DistanceMethod::projection) return projection_distances(a);
    const Eigen::VectorXd norms = inverse_row_norms(a, method == DistanceMethod::automatic);
    if (norms.size() == 0) return projection_distances(a);
    return norms.cwiseInverse().cwiseMin(1.0);
}

template <FieldScalar T>
double potential_phi(const ColumnMatrix<T>& a) {
    const Eigen::VectorXd norms = inverse_row_norms(a, true);
    double phi = 0.0;
    if (norms.size() == 0) {
        for (double dj : projection_distances(a)) phi -= std::log(dj);
    } else {
        for (double r : norms) phi += std::max(std::log(r), 0.0);
    }
    return phi;
}

template <FieldScalar T>
ConditionNumber condition_number(const ColumnMatrix<T>& a) {
    Eigen::JacobiSVD<DenseMatrix<T>> svd(a.dense());
    Eigen::VectorXd sigma = svd.singularValues();
    return {sigma(0) / sigma(sigma.size() - 1), std::move(sigma)};
}

template <FieldScalar T>
MetricsSnapshot snapshot(const ColumnMatrix<T>& a) {
    MetricsSnapshot s;
    s.d = leave_one_out_distances(a);
    s.phi = 0.0;
    for (double dj : s.d) s.phi -= std::log(dj);
    auto cond = condition_number(a);
    s.kappa = cond.kappa;
    s.sigma = std::move(cond.sigma);
    s.gram_offdiag = gram_offdiag_fro(a);
    return s;
}

bool HadamardReport::all_hold() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
}

template <FieldScalar T>
HadamardReport hadamard_report(const ColumnMatrix<T>& a) {
    const double n = static_cast<double>(a.dim());
    const double phi = potential_phi(a);

    Eigen::PartialPivLU<DenseMatrix<T>> lu(a.dense());
    double log_det = 0.0;
    const auto& packed = lu.matrixLU();
    for (Eigen::Index k = 0; k < packed.rows(); ++k) log_det += std::log(std::abs(packed(k, k)));

    const auto cond = condition_number(a);
    const double log_norm = std::log(cond.sigma(0));
    const double log_inv_norm = -std::log(cond.sigma(cond.sigma.size() - 1));
    const double log_sqrt_n = 0.5 * std::log(n);

    const double slack = std::log1p(tol::kHadamard);
    auto check = [slack](std::string_view name, double log_value, double log_bound) {
        return InequalityCheck{name,      std::exp(log_value), std::exp(log_bound),
                               log_value, log_bound,           log_value <= log_bound + slack};
    };
    return HadamardReport{phi,
                          {check("|det A| <= 1", log_det, 0.0),
                           check("|det A^-1| <= exp(phi)", -log_det, phi),
                           check("||A|| <= sqrt(n)", log_norm, log_sqrt_n),
                           check("||A^-1|| <= sqrt(n) exp(phi)", log_inv_norm, log_sqrt_n + phi)}};
}

#define PAIRORTH_INSTANTIATE(T)                                                           \
    template Eigen::VectorXd leave_one_out_distances(const ColumnMatrix<T>&, DistanceMethod); \
    template double potential_phi(const ColumnMatrix<T>&);                                \
    template ConditionNumber condition_number(const ColumnMatrix<T>&);                    \
    template MetricsSnapshot snapshot(const ColumnMatrix<T>&);                            \
    template HadamardReport hadamard_report(const ColumnMatrix<T>&);

PAIRORTH_INSTANTIATE(double)
PAIRORTH_INSTANTIATE(std::complex<double>)

#undef PAIRORTH_INSTANTIATE

}  // namespace pairorth
