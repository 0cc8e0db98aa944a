#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "pairorth/generators.hpp"
#include "pairorth/matrix.hpp"
#include "pairorth/random.hpp"

namespace pairorth::testing {

using cplx = std::complex<double>;

// Columns (1, 0) and (cos theta, sin theta).
inline RealMatrix angle_matrix(double theta) {
    RealMatrix::Dense m(2, 2);
    m << 1.0, std::cos(theta), 0.0, std::sin(theta);
    return RealMatrix::build(m, false);
}

inline RealMatrix sixty_degrees() { return angle_matrix(std::numbers::pi / 3); }

template <FieldScalar T>
ColumnMatrix<T> gaussian(std::size_t n, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::gaussian_normalized;
    spec.n = n;
    spec.field = field_of<T>;
    spec.seed = seed;
    return generate<T>(spec).matrix;
}

template <FieldScalar T>
ColumnMatrix<T> with_kappa(std::size_t n, double kappa, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::prescribed_spectrum;
    spec.n = n;
    spec.field = field_of<T>;
    spec.seed = seed;
    spec.sigma = geometric_spectrum(n, kappa);
    return generate<T>(spec).matrix;
}

}  // namespace pairorth::testing
