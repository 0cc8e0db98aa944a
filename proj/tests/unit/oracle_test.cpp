#include <gtest/gtest.h>

#include <cmath>

#include "pairorth/bounds.hpp"
#include "pairorth/certify.hpp"
#include "pairorth/metrics.hpp"
#include "pairorth/oracle.hpp"
#include "support.hpp"

namespace pairorth {
namespace {

using testing::cplx;

TEST(OneStep, Orthonormal) {
    const auto e = oracle::exact_one_step_expectation(RealMatrix::identity(4));
    EXPECT_EQ(e.successors, 12u);
    EXPECT_NEAR(e.mean, 0.0, 1e-15);
}

TEST(OneStep, SixtyDegrees) {
    const auto e = oracle::exact_one_step_expectation(testing::sixty_degrees());
    EXPECT_EQ(e.successors, 2u);
    EXPECT_NEAR(e.mean, 0.0, 1e-12);
    EXPECT_LE(e.mean, f_map(potential_phi(testing::sixty_degrees()), 2));
}

TEST(OneStep, MatchesManualAverage) {
    const auto a = testing::gaussian<cplx>(4, 31);
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            if (i != j) sum += potential_phi(orth_step(a, {i, j}));
        }
    }
    EXPECT_NEAR(oracle::exact_one_step_expectation(a).mean, sum / 12, 1e-12);
}

TEST(OneStep, GaussianStatesStayBelowMap) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto a = testing::gaussian<double>(4, 1000 + s);
        EXPECT_LE(oracle::exact_one_step_expectation(a).mean, f_map(potential_phi(a), 4) + 1e-9) << s;
    }
}

TEST(BruteForce, Examples) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(oracle::brute_force_distance(RealMatrix::identity(3), j), 1.0, 1e-15);
    EXPECT_NEAR(oracle::brute_force_distance(testing::sixty_degrees(), 0), std::sqrt(3.0) / 2, 1e-15);
}

TEST(BruteForce, AgreesWithInverseRows) {
    const auto a = testing::gaussian<cplx>(6, 2);
    const auto d = leave_one_out_distances(a, DistanceMethod::inverse_rows);
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_NEAR(oracle::brute_force_distance(a, j), d(static_cast<Eigen::Index>(j)), 1e-12);
    }
}

TEST(Lemma3Report, Orthonormal) {
    const auto r = oracle::verify_lemma3(RealMatrix::identity(3), {0, 2});
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.monotone_margin, 0.0, 1e-15);
    EXPECT_NEAR(r.ratio_margin, 0.0, 1e-15);
}

TEST(Lemma3Report, SixtyDegrees) {
    const auto r = oracle::verify_lemma3(testing::sixty_degrees(), {0, 1});
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.d_before(0), std::sqrt(3.0) / 2, 1e-12);
    EXPECT_NEAR(r.d_after(0), 1.0, 1e-12);
    EXPECT_NEAR(r.ratio_margin, 0.0, 1e-12);
    EXPECT_NEAR(r.inner_abs, 0.5, 1e-15);
}

// The untouched columns keep their distance, and column i gains exactly the
// factor 1 / sqrt(1 - |c|^2).
TEST(StepDistances, ExactChangesOutsideColumnJ) {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const std::size_t n = 3 + s % 4;
        const auto a = testing::gaussian<cplx>(n, 500 + s);
        Xoshiro256 rng(s);
        const std::size_t i = uniform_index(rng, n);
        std::size_t j = uniform_index(rng, n - 1);
        if (j >= i) ++j;
        const auto r = oracle::verify_lemma3(a, {i, j});
        for (std::size_t k = 0; k < n; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            if (k == i) {
                const double want = r.d_before(kk) / std::sqrt(1 - r.inner_abs * r.inner_abs);
                EXPECT_NEAR(r.d_after(kk), want, 1e-10 * want);
            } else if (k != j) {
                EXPECT_NEAR(r.d_after(kk), r.d_before(kk), 1e-10);
            }
        }
    }
}

// Column j's distance is not monotone: orthogonalizing a nearly antiparallel
// a_2 against a_1 pulls a_1 into span(a_0, a_2').
TEST(StepDistances, ColumnJCanShrink) {
    const double eps = 1e-3;
    RealMatrix::Dense m(3, 3);
    m.col(0) << 1, 0, 0;
    m.col(1) << 1, 1, 0;
    m.col(2) << -1, 0, eps;
    const auto a = RealMatrix::build(m, true);
    const auto r = oracle::verify_lemma3(a, {2, 1});
    EXPECT_NEAR(r.d_before(1), std::sqrt(0.5), 1e-12);
    EXPECT_LT(r.d_after(1), 10 * eps);
    EXPECT_GT(r.phi_after, r.phi_before + 4.0);
    EXPECT_FALSE(r.pass);
}

TEST(HighPrecision, BoundNames) {
    EXPECT_EQ(oracle::parse_bound_id("theorem7"), oracle::BoundId::theorem7);
    EXPECT_EQ(oracle::parse_bound_id("f_map"), oracle::BoundId::f_map);
    EXPECT_THROW(oracle::parse_bound_id("nope"), UsageError);
}

TEST(Certify, SuitesThatHold) {
    using certify::Suite;
    for (auto suite : {Suite::lemma10, Suite::eq9, Suite::hadamard, Suite::kappa_sandwich}) {
        const auto r = certify::run_suite(suite, 60, 3);
        EXPECT_TRUE(r.ok()) << certify::to_string(suite) << ": " << (r.first_failure ? r.first_failure->detail : "");
        EXPECT_EQ(certify::parse_suite(certify::to_string(suite)), suite);
    }
}

TEST(Certify, FailureCarriesReproducer) {
    const auto r = certify::run_suite(certify::Suite::lemma3, 2000, 1);
    ASSERT_FALSE(r.ok());
    ASSERT_TRUE(r.first_failure);
    EXPECT_NE(r.first_failure->matrix_text.find("pairorth-matrix v1"), std::string::npos);
    EXPECT_LT(r.worst_margin, -1e-10);
}

TEST(Certify, TStarInstanceInRange) {
    const auto a = certify::tstar_instance(4);
    const double phi = potential_phi(a);
    EXPECT_GE(phi, 4.0);
    EXPECT_LE(phi, 6.0);
    EXPECT_EQ(a.dim(), 4u);
}

}  // namespace
}  // namespace pairorth
