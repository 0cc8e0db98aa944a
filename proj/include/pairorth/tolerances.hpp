#pragma once

// Single table of numerical tolerances shared by the library and its tests.

namespace pairorth::tol {

// Column norms within this of 1 are stored bit-for-bit.
inline constexpr double kUnitExact = 1e-12;
// Column norms within this of 1 are accepted (and rescaled) without `normalize`.
inline constexpr double kUnitAccept = 1e-9;
// orth_step refuses pairs with 1 - |<a_i, a_j>| below this.
inline constexpr double kDependenceGuard = 1e-12;
// Smallest singular value must exceed kRankFloorPerDim * n at construction.
inline constexpr double kRankFloorPerDim = 1e-14;

inline constexpr double kOrthogonality = 1e-12;
inline constexpr double kMonotonicity = 1e-10;
inline constexpr double kPhiIdentity = 1e-10;
inline constexpr double kDistanceAgreement = 1e-8;
inline constexpr double kHadamard = 1e-9;
inline constexpr double kGramResidual = 1e-9;
inline constexpr double kKappaSandwich = 1e-9;
inline constexpr double kOneStep = 1e-9;
inline constexpr double kSolutionPreservation = 1e-8;
inline constexpr double kKaczmarzResidual = 1e-12;
inline constexpr double kHighPrecisionAgreement = 1e-12;

// Estimated condition number above which distances switch to the projection method.
inline constexpr double kInverseRowsMaxKappa = 1e8;
// Proportional sampling falls back to uniform below this |<a_i, a_j>|.
inline constexpr double kProportionalFloor = 1e-15;
// Fraction of aborted replicates that fails an ensemble.
inline constexpr double kMaxAbortFraction = 0.01;

}  // namespace pairorth::tol
