#include "pairorth/matrix.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "pairorth/tolerances.hpp"

namespace pairorth {

DegeneratePairError::DegeneratePairError(std::size_t i, std::size_t j, double inner_abs)
    : std::runtime_error("degenerate pair (" + std::to_string(i) + ", " + std::to_string(j) +
                         "): columns numerically parallel, |<a_i, a_j>| = " +
                         std::to_string(inner_abs)),
      i_(i),
      j_(j),
      inner_abs_(inner_abs) {}

SingularityError::SingularityError(std::size_t column, const std::string& what)
    : std::runtime_error(what), column_(column) {}

std::string_view to_string(Field field) { return field == Field::real ? "real" : "complex"; }

Field parse_field(std::string_view text) {
    if (text == "real") return Field::real;
    if (text == "complex") return Field::complex;
    throw UsageError("unknown field '" + std::string(text) + "' (expected real or complex)");
}

void check_pair(PairIndex pair, std::size_t n) {
    if (pair.i == pair.j || pair.i >= n || pair.j >= n) {
        std::ostringstream msg;
        msg << "invalid pair (" << pair.i << ", " << pair.j << ") for n = " << n;
        throw UsageError(msg.str());
    }
}

template <FieldScalar T>
ColumnMatrix<T> ColumnMatrix<T>::build(Dense entries, bool normalize) {
    const auto n = entries.cols();
    if (entries.rows() != n) throw ConstructionError("matrix must be square");
    if (n < 2) throw ConstructionError("dimension must be at least 2");
    if (!entries.allFinite()) throw ConstructionError("matrix has non-finite entries");

    for (Eigen::Index k = 0; k < n; ++k) {
        const double norm = entries.col(k).norm();
        if (norm == 0.0) {
            throw ConstructionError("column " + std::to_string(k) + " is zero");
        }
        const double off = std::abs(norm - 1.0);
        if (normalize) {
            if (off > tol::kUnitExact) entries.col(k) /= norm;
        } else if (off > tol::kUnitAccept) {
            throw ConstructionError("column " + std::to_string(k) + " has norm " +
                                    std::to_string(norm) + ", expected 1");
        } else if (off > tol::kUnitExact) {
            entries.col(k) /= norm;
        }
    }

    Eigen::JacobiSVD<Dense> svd(entries);
    const double sigma_min = svd.singularValues()(n - 1);
    const double floor = tol::kRankFloorPerDim * static_cast<double>(n);
    if (!(sigma_min > floor)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "rank deficient: smallest singular value " << sigma_min << " <= floor " << floor;
        throw ConstructionError(msg.str());
    }
    return ColumnMatrix(std::move(entries));
}

template <FieldScalar T>
ColumnMatrix<T> ColumnMatrix<T>::identity(std::size_t n) {
    if (n < 2) throw ConstructionError("dimension must be at least 2");
    const auto m = static_cast<Eigen::Index>(n);
    return ColumnMatrix(Dense::Identity(m, m));
}

template <FieldScalar T>
OrthUpdate<T> orth_update(const ColumnMatrix<T>& a, PairIndex pair) {
    check_pair(pair, a.dim());
    const auto ai = a.column(pair.i);
    const auto aj = a.column(pair.j);

    T coefficient = inner(ai, aj);
    const double inner_abs = std::abs(coefficient);
    if (1.0 - inner_abs < tol::kDependenceGuard) {
        throw DegeneratePairError(pair.i, pair.j, inner_abs);
    }

    DenseVector<T> residual = ai - coefficient * aj;
    // Second projection pass; the correction is zero in exact arithmetic.
    const T correction = inner(residual, aj);
    residual -= correction * aj;
    coefficient += correction;

    const double scale = residual.norm();
    typename ColumnMatrix<T>::Dense next = a.dense();
    next.col(static_cast<Eigen::Index>(pair.i)) = residual / scale;
    return OrthUpdate<T>{ColumnMatrix<T>(std::move(next)), coefficient, scale, inner_abs};
}

template <FieldScalar T>
double gram_offdiag_fro(const ColumnMatrix<T>& a) {
    const std::size_t n = a.dim();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            sum += 2.0 * std::norm(inner(a.column(i), a.column(j)));
        }
    }
    return std::sqrt(sum);
}

std::size_t dim(const AnyMatrix& a) {
    return std::visit([](const auto& m) { return m.dim(); }, a);
}

Field field(const AnyMatrix& a) {
    return std::visit([](const auto& m) { return m.field(); }, a);
}

template class ColumnMatrix<double>;
template class ColumnMatrix<std::complex<double>>;
template OrthUpdate<double> orth_update(const ColumnMatrix<double>&, PairIndex);
template OrthUpdate<std::complex<double>> orth_update(const ColumnMatrix<std::complex<double>>&,
                                                      PairIndex);
template double gram_offdiag_fro(const ColumnMatrix<double>&);
template double gram_offdiag_fro(const ColumnMatrix<std::complex<double>>&);

}  // namespace pairorth
