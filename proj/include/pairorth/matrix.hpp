#pragma once

#include <complex>
#include <concepts>
#include <cstddef>
#include <string_view>
#include <type_traits>
#include <variant>

#include <Eigen/Dense>

#include "pairorth/errors.hpp"

namespace pairorth {

enum class Field { real, complex };

std::string_view to_string(Field field);
Field parse_field(std::string_view text);

template <typename T>
concept FieldScalar = std::same_as<T, double> || std::same_as<T, std::complex<double>>;

template <FieldScalar T>
inline constexpr Field field_of = std::is_same_v<T, double> ? Field::real : Field::complex;

template <FieldScalar T>
using DenseMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
template <FieldScalar T>
using DenseVector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Ordered pair of distinct column indices: column `i` is replaced, column `j` is the pivot.
struct PairIndex {
    std::size_t i = 0;
    std::size_t j = 1;

    friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

/// <x, y> = sum_k x_k conj(y_k). Throws UsageError on a length mismatch.
template <typename X, typename Y>
auto inner(const Eigen::MatrixBase<X>& x, const Eigen::MatrixBase<Y>& y) {
    static_assert(std::is_same_v<typename X::Scalar, typename Y::Scalar>,
                  "inner product operands must share one field");
    if (x.size() != y.size()) throw UsageError("inner: vectors differ in length");
    // Eigen conjugates the left operand of dot().
    return y.dot(x);
}

template <FieldScalar T>
struct OrthUpdate;
template <FieldScalar T>
class ColumnMatrix;
template <FieldScalar T>
OrthUpdate<T> orth_update(const ColumnMatrix<T>& a, PairIndex pair);

/**
 * Square matrix with unit-length, linearly independent columns.
 *
 * Entries are stored column-major. Values are immutable once built; the
 * update operations return new matrices.
 */
template <FieldScalar T>
class ColumnMatrix {
  public:
    using Scalar = T;
    using Dense = DenseMatrix<T>;
    using Vector = DenseVector<T>;

    /// Validates `entries`: square, n >= 2, no zero column, unit columns
    /// (unless `normalize`), smallest singular value above the rank floor.
    static ColumnMatrix build(Dense entries, bool normalize);

    static ColumnMatrix identity(std::size_t n);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
    static constexpr Field field() noexcept { return field_of<T>; }

    const Dense& dense() const noexcept { return entries_; }
    auto column(std::size_t k) const { return entries_.col(static_cast<Eigen::Index>(k)); }
    T operator()(std::size_t row, std::size_t col) const {
        return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    friend bool operator==(const ColumnMatrix& a, const ColumnMatrix& b) {
        return a.entries_.rows() == b.entries_.rows() && a.entries_.cols() == b.entries_.cols() &&
               a.entries_ == b.entries_;
    }

  private:
    explicit ColumnMatrix(Dense entries) : entries_(std::move(entries)) {}

    template <FieldScalar U>
    friend OrthUpdate<U> orth_update(const ColumnMatrix<U>&, PairIndex);

    Dense entries_;
};

using RealMatrix = ColumnMatrix<double>;
using ComplexMatrix = ColumnMatrix<std::complex<double>>;
using AnyMatrix = std::variant<RealMatrix, ComplexMatrix>;

/// Result of one pairwise orthogonalization together with the coefficients
/// it applied: a_i' = (a_i - coefficient * a_j) / scale.
template <FieldScalar T>
struct OrthUpdate {
    ColumnMatrix<T> matrix;
    T coefficient;
    double scale;
    double inner_abs;  // |<a_i, a_j>| before the update
};

/// Replaces column `pair.i` by its component orthogonal to column `pair.j`,
/// renormalized. Throws DegeneratePairError when the two are numerically parallel.
template <FieldScalar T>
ColumnMatrix<T> orth_step(const ColumnMatrix<T>& a, PairIndex pair) {
    return orth_update(a, pair).matrix;
}

/// ||A*A - I||_F, evaluated over the off-diagonal inner products.
template <FieldScalar T>
double gram_offdiag_fro(const ColumnMatrix<T>& a);

void check_pair(PairIndex pair, std::size_t n);

std::size_t dim(const AnyMatrix& a);
Field field(const AnyMatrix& a);

}  // namespace pairorth
