#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pairorth/generators.hpp"
#include "pairorth/metrics.hpp"

namespace pairorth {
namespace {

GeneratorSpec spec_of(GeneratorKind kind, std::size_t n, std::uint64_t seed, Field field = Field::real) {
    GeneratorSpec s;
    s.kind = kind;
    s.n = n;
    s.seed = seed;
    s.field = field;
    return s;
}

TEST(Generators, AngleRightIsIdentity) {
    auto s = spec_of(GeneratorKind::two_by_two_angle, 2, 0);
    s.theta = std::numbers::pi / 2;
    const auto g = generate<double>(s);
    EXPECT_NEAR(g.achieved.phi, 0.0, 1e-15);
    EXPECT_NEAR(g.matrix(0, 1), 0.0, 1e-15);
    EXPECT_NEAR(g.matrix(1, 1), 1.0, 1e-15);
}

TEST(Generators, AngleSixty) {
    auto s = spec_of(GeneratorKind::two_by_two_angle, 2, 0);
    s.theta = std::numbers::pi / 3;
    const auto g = generate<double>(s);
    EXPECT_NEAR(g.achieved.phi, 0.287682, 1e-6);
    EXPECT_NEAR(g.achieved.kappa, 1.732051, 1e-6);
}

TEST(Generators, AngleNeedsTwo) {
    EXPECT_THROW(generate<double>(spec_of(GeneratorKind::two_by_two_angle, 3, 0)), UsageError);
}

TEST(Generators, NearSingularHitsTarget) {
    auto s = spec_of(GeneratorKind::near_singular, 8, 7);
    s.eta = 1e-6;
    const auto g = generate<double>(s);
    const double dmin = g.achieved.d.minCoeff();
    EXPECT_GE(dmin, 1e-7);
    EXPECT_LE(dmin, 1e-5);
    EXPECT_GE(g.achieved.phi, std::log(1 / dmin));
    EXPECT_GE(g.achieved.phi, 11.5);
}

TEST(Generators, NearSingularComplex) {
    auto s = spec_of(GeneratorKind::near_singular, 5, 3, Field::complex);
    s.eta = 1e-4;
    const auto g = generate<std::complex<double>>(s);
    EXPECT_GE(g.achieved.d.minCoeff(), 1e-5);
    EXPECT_LE(g.achieved.d.minCoeff(), 1e-3);
}

TEST(Generators, NearSingularRejectsBadEta) {
    auto s = spec_of(GeneratorKind::near_singular, 4, 1);
    s.eta = 0.0;
    EXPECT_THROW(generate<double>(s), UsageError);
    s.eta = 1.0;
    EXPECT_THROW(generate<double>(s), UsageError);
}

TEST(Generators, HaarIsOrthonormal) {
    for (auto field : {Field::real, Field::complex}) {
        const auto a = generate_any(spec_of(GeneratorKind::haar_orthonormal, 7, 11, field));
        std::visit([](const auto& m) { EXPECT_LT(gram_offdiag_fro(m), 1e-13); }, a);
    }
}

TEST(Generators, HaarFirstEntryIsSymmetric) {
    // The sign of Q(0,0) should be a fair coin under Haar measure.
    int positive = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        positive += generate<double>(spec_of(GeneratorKind::haar_orthonormal, 3, s)).matrix(0, 0) > 0;
    }
    EXPECT_GT(positive, 150);
    EXPECT_LT(positive, 250);
}

TEST(Generators, PrescribedSpectrumNeedsSigma) {
    auto s = spec_of(GeneratorKind::prescribed_spectrum, 3, 1);
    EXPECT_THROW(generate<double>(s), UsageError);
    s.sigma = {1.0, 0.5};
    EXPECT_THROW(generate<double>(s), UsageError);
    s.sigma = {1.0, -0.5, 0.2};
    EXPECT_THROW(generate<double>(s), UsageError);
}

TEST(Generators, PrescribedSpectrumConditioning) {
    // Normalizing the columns changes kappa, but by at most a factor of n.
    for (double kappa : {10.0, 1e3, 1e5}) {
        auto s = spec_of(GeneratorKind::prescribed_spectrum, 8, 5);
        s.sigma = geometric_spectrum(8, kappa);
        const auto g = generate<double>(s);
        EXPECT_GT(g.achieved.kappa, kappa / 8);
        EXPECT_LT(g.achieved.kappa, kappa * 8);
    }
}

TEST(Generators, GeometricSpectrum) {
    const auto s = geometric_spectrum(4, 1000.0);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_DOUBLE_EQ(s[0], 1.0);
    EXPECT_NEAR(s[3], 1e-3, 1e-18);
    EXPECT_NEAR(s[1] / s[2], s[0] / s[1], 1e-12);
}

TEST(Generators, Deterministic) {
    for (auto kind : {GeneratorKind::haar_orthonormal, GeneratorKind::gaussian_normalized,
                      GeneratorKind::near_singular}) {
        auto s = spec_of(kind, 6, 123, Field::complex);
        s.eta = 1e-3;
        EXPECT_EQ(generate_any(s), generate_any(s));
        auto other = s;
        other.seed = 124;
        EXPECT_NE(generate_any(s), generate_any(other));
    }
}

TEST(Generators, Names) {
    EXPECT_EQ(parse_generator("haar"), GeneratorKind::haar_orthonormal);
    EXPECT_EQ(parse_generator("near_singular"), GeneratorKind::near_singular);
    EXPECT_EQ(parse_generator(to_string(GeneratorKind::prescribed_spectrum)), GeneratorKind::prescribed_spectrum);
    EXPECT_THROW(parse_generator("wishart"), UsageError);
}

}  // namespace
}  // namespace pairorth
