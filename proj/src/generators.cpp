#include "pairorth/generators.hpp"

#include <cmath>
#include <string>

#include "pairorth/random.hpp"

namespace pairorth {

std::string_view to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::haar_orthonormal: return "haar_orthonormal";
        case GeneratorKind::gaussian_normalized: return "gaussian_normalized";
        case GeneratorKind::prescribed_spectrum: return "prescribed_spectrum";
        case GeneratorKind::two_by_two_angle: return "two_by_two_angle";
        case GeneratorKind::near_singular: return "near_singular";
    }
    return "gaussian_normalized";
}

GeneratorKind parse_generator(std::string_view text) {
    if (text == "haar_orthonormal" || text == "haar") return GeneratorKind::haar_orthonormal;
    if (text == "gaussian_normalized" || text == "gaussian") return GeneratorKind::gaussian_normalized;
    if (text == "prescribed_spectrum" || text == "spectrum") return GeneratorKind::prescribed_spectrum;
    if (text == "two_by_two_angle" || text == "angle") return GeneratorKind::two_by_two_angle;
    if (text == "near_singular" || text == "near-singular") return GeneratorKind::near_singular;
    throw UsageError("unknown generator '" + std::string(text) + "'");
}

std::vector<double> geometric_spectrum(std::size_t n, double kappa) {
    if (n < 2) throw UsageError("geometric_spectrum: n must be at least 2");
    if (!(kappa >= 1.0)) throw UsageError("geometric_spectrum: kappa must be at least 1");
    std::vector<double> sigma(n);
    for (std::size_t k = 0; k < n; ++k) {
        sigma[k] = std::pow(kappa, -static_cast<double>(k) / static_cast<double>(n - 1));
    }
    return sigma;
}

namespace {

template <FieldScalar T>
T gaussian_entry(Xoshiro256& rng) {
    if constexpr (std::is_same_v<T, double>) {
        return standard_normal(rng);
    } else {
        const double re = standard_normal(rng);
        const double im = standard_normal(rng);
        return {re * M_SQRT1_2, im * M_SQRT1_2};
    }
}

template <FieldScalar T>
DenseMatrix<T> gaussian(Eigen::Index rows, Eigen::Index cols, Xoshiro256& rng) {
    DenseMatrix<T> g(rows, cols);
    // Column by column so the draw order is fixed by the storage layout.
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = gaussian_entry<T>(rng);
    }
    return g;
}

// Haar-distributed unitary: QR of a Gaussian matrix with R's diagonal phases moved into Q.
template <FieldScalar T>
DenseMatrix<T> haar_unitary(Eigen::Index n, Xoshiro256& rng) {
    Eigen::HouseholderQR<DenseMatrix<T>> qr(gaussian<T>(n, n, rng));
    DenseMatrix<T> q = qr.householderQ() * DenseMatrix<T>::Identity(n, n);
    const auto& r = qr.matrixQR();
    for (Eigen::Index k = 0; k < n; ++k) {
        const T diag = r(k, k);
        const double mag = std::abs(diag);
        if (mag > 0.0) q.col(k) *= diag / mag;
    }
    return q;
}

template <FieldScalar T>
DenseMatrix<T> near_singular_entries(Eigen::Index n, double eta, Xoshiro256& rng) {
    DenseMatrix<T> a = gaussian<T>(n, n, rng);
    for (Eigen::Index k = 0; k < n; ++k) a.col(k).normalize();

    Eigen::HouseholderQR<DenseMatrix<T>> qr(a.leftCols(n - 1));
    const DenseMatrix<T> q = qr.householderQ() * DenseMatrix<T>::Identity(n, n);
    const auto basis = q.leftCols(n - 1);
    const DenseVector<T> residual_dir = q.col(n - 1);

    DenseVector<T> in_span = basis * (basis.adjoint() * gaussian<T>(n, 1, rng));
    in_span.normalize();
    DenseVector<T> mixed = (1.0 - eta) * in_span + eta * residual_dir;
    a.col(n - 1) = mixed / mixed.norm();
    return a;
}

}  // namespace

template <FieldScalar T>
Generated<T> generate(const GeneratorSpec& spec) {
    if (spec.n < 2) throw UsageError("generator dimension must be at least 2");
    const auto n = static_cast<Eigen::Index>(spec.n);
    Xoshiro256 rng(spec.seed);

    DenseMatrix<T> entries;
    switch (spec.kind) {
        case GeneratorKind::haar_orthonormal:
            entries = haar_unitary<T>(n, rng);
            break;
        case GeneratorKind::gaussian_normalized:
            entries = gaussian<T>(n, n, rng);
            break;
        case GeneratorKind::prescribed_spectrum: {
            if (spec.sigma.size() != spec.n) {
                throw UsageError("prescribed_spectrum needs exactly n singular values");
            }
            Eigen::VectorXd sigma(n);
            for (Eigen::Index k = 0; k < n; ++k) {
                sigma(k) = spec.sigma[static_cast<std::size_t>(k)];
                if (!(sigma(k) > 0.0)) throw UsageError("prescribed singular values must be positive");
            }
            const DenseMatrix<T> u = haar_unitary<T>(n, rng);
            const DenseMatrix<T> v = haar_unitary<T>(n, rng);
            entries = u * sigma.cast<T>().asDiagonal() * v.adjoint();
            break;
        }
        case GeneratorKind::two_by_two_angle:
            if (spec.n != 2) throw UsageError("two_by_two_angle requires n = 2");
            entries.resize(2, 2);
            entries << T(1.0), T(std::cos(spec.theta)), T(0.0), T(std::sin(spec.theta));
            break;
        case GeneratorKind::near_singular:
            if (!(spec.eta > 0.0 && spec.eta < 1.0)) throw UsageError("eta must lie in (0, 1)");
            entries = near_singular_entries<T>(n, spec.eta, rng);
            break;
    }
    auto matrix = ColumnMatrix<T>::build(std::move(entries), true);
    auto achieved = snapshot(matrix);
    return {std::move(matrix), std::move(achieved)};
}

AnyMatrix generate_any(const GeneratorSpec& spec) {
    if (spec.field == Field::real) return generate<double>(spec).matrix;
    return generate<std::complex<double>>(spec).matrix;
}

template Generated<double> generate(const GeneratorSpec&);
template Generated<std::complex<double>> generate(const GeneratorSpec&);

}  // namespace pairorth
