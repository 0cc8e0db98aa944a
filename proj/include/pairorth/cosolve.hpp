#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pairorth/matrix.hpp"
#include "pairorth/process.hpp"

namespace pairorth {

/// Round-robin schedule: `orth` orthogonalization steps, then `kaczmarz` solver steps.
struct Interleave {
    unsigned orth = 1;
    unsigned kaczmarz = 1;

    static Interleave parse(std::string_view text);  // "p:q"
    std::string str() const;

    friend bool operator==(const Interleave&, const Interleave&) = default;
};

/// Kaczmarz on A* x = b while A is orthogonalized in place. Every orth step
/// rewrites the matching entry of b, so x_true solves every intermediate system.
template <FieldScalar T>
struct CosolveState {
    ColumnMatrix<T> a;
    DenseVector<T> b;
    DenseVector<T> x;
    DenseVector<T> x_true;  // held for verification only

    /// b = A* x_true, x = 0.
    static CosolveState start(ColumnMatrix<T> a0, DenseVector<T> x_true);

    /// ||A* x_true - b||
    double preservation_residual() const;
    double error_norm() const { return (x - x_true).norm(); }
};

/// orth_step on A plus b_i <- (b_i - conj(c) b_j) / nu, where c = <a_i, a_j> and
/// nu = ||a_i - c a_j||.
template <FieldScalar T>
CosolveState<T> orth_with_rhs(const CosolveState<T>& state, PairIndex pair);

/// x <- x + (b_row - <x, a_row>) a_row; equation `row` becomes exact.
template <FieldScalar T>
CosolveState<T> kaczmarz_step(const CosolveState<T>& state, std::size_t row);

enum class CosolveKind { orth, kaczmarz };

struct CosolveRecord {
    std::uint64_t step;
    CosolveKind kind;
    double err_norm;
    double phi;
};

struct CosolveOptions {
    Interleave interleave;
    std::uint64_t steps = 0;  // total operations of either kind
    std::uint64_t seed = 0;
    std::optional<double> stop_error;  // stop once ||x - x_true|| <= this
};

template <FieldScalar T>
struct CosolveResult {
    std::vector<CosolveRecord> history;
    Trajectory trajectory;  // the orthogonalization steps only
    CosolveState<T> final_state;
    double initial_error = 0.0;
    double initial_phi = 0.0;
    std::uint64_t kaczmarz_steps = 0;
    std::uint64_t orth_steps = 0;
    bool reached_stop_error = false;
    double max_preservation_residual = 0.0;
    double max_kaczmarz_residual = 0.0;  // |<x, a_row> - b_row| right after each solver step
};

/// Orth pairs (uniform) and solver rows (uniform) come from independent
/// streams derived from `seed`, so runs with different schedules but the same
/// seed see the same row sequence.
template <FieldScalar T>
CosolveResult<T> run_cosolve(const ColumnMatrix<T>& a0, const DenseVector<T>& x_true,
                             const CosolveOptions& options);

std::string cosolve_csv(const std::vector<CosolveRecord>& history);

}  // namespace pairorth
