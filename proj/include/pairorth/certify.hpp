#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pairorth/matrix.hpp"

// Randomized certification suites: each draws seeded random states and checks
// one of the analysis inequalities against the oracle or closed-form bound.

namespace pairorth::certify {

enum class Suite {
    lemma3,          // per-step monotonicity of every d_k and of Phi
    lemma10,         // ||A*A - I||_F^2 >= n/(n-1) (1 - sigma_n^2)^2
    onestep,         // exact E Phi(A') <= f(Phi(A))
    eq9,             // d_j = 1 / ||row j of A^{-1}||, three independent routes
    hadamard,        // determinant and norm inequalities
    kappa_sandwich,  // exp(Phi/n) <= kappa <= n exp(Phi), and the tight form when 2 Phi < 1
    tstar_tail,      // Pr(t* > c 16 (n-1)^2 phi0) <= 2^{-c}, c = 1, 2, 3
};

std::string_view to_string(Suite suite);
Suite parse_suite(std::string_view text);

struct Failure {
    std::size_t trial = 0;
    std::uint64_t seed = 0;  // seed that regenerates the failing instance
    std::string detail;
    std::string matrix_text;  // failing matrix in the pairorth-matrix format
};

struct SuiteResult {
    Suite suite = Suite::lemma3;
    std::size_t checks = 0;
    std::size_t passed = 0;
    double worst_margin = 0.0;  // smallest slack seen; negative beyond tolerance means failure
    std::optional<Failure> first_failure;
    std::string note;

    bool ok() const noexcept { return checks > 0 && passed == checks; }
};

/// Runs `trials` random instances (for tstar_tail, `trials` replicates of one
/// instance). Deterministic in `seed`.
SuiteResult run_suite(Suite suite, std::size_t trials, std::uint64_t seed);

/// The n = 4 starting matrix used by the t* tail suite: a near-singular
/// instance whose achieved Phi lies in [4, 6].
RealMatrix tstar_instance(std::uint64_t seed);

}  // namespace pairorth::certify
