#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "pairorth/matrix.hpp"
#include "pairorth/metrics.hpp"

namespace pairorth {

enum class GeneratorKind {
    haar_orthonormal,
    gaussian_normalized,
    prescribed_spectrum,
    two_by_two_angle,
    near_singular,
};

std::string_view to_string(GeneratorKind kind);
/// Accepts the canonical names and the short CLI aliases (haar, gaussian, spectrum, angle, near-singular).
GeneratorKind parse_generator(std::string_view text);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::gaussian_normalized;
    std::size_t n = 2;
    Field field = Field::real;
    std::uint64_t seed = 0;
    std::vector<double> sigma;  // prescribed_spectrum: n positive target singular values
    double theta = 0.0;         // two_by_two_angle
    double eta = 0.0;           // near_singular: target leave-one-out distance, in (0, 1)

    friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

template <FieldScalar T>
struct Generated {
    ColumnMatrix<T> matrix;
    MetricsSnapshot achieved;
};

/// Builds the matrix described by `spec` in field T and reports its achieved
/// metrics. Targets (spectra, eta) are approximate once columns are
/// renormalized; callers should read `achieved`.
template <FieldScalar T>
Generated<T> generate(const GeneratorSpec& spec);

/// As above, choosing the field from `spec.field`.
AnyMatrix generate_any(const GeneratorSpec& spec);

/// Singular values spaced geometrically from 1 down to 1/kappa.
std::vector<double> geometric_spectrum(std::size_t n, double kappa);

}  // namespace pairorth
