#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pairorth/matrix.hpp"
#include "pairorth/metrics.hpp"
#include "pairorth/random.hpp"

namespace pairorth {

/// How the ordered pair (i, j) is chosen at each step.
enum class SamplerKind {
    uniform,       // each of the n(n-1) ordered pairs with equal probability
    proportional,  // probability proportional to |<a_i, a_j>|^2
    greedy,        // argmax |<a_i, a_j>|, ties to the smallest (i, j)
};

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler(std::string_view text);

template <FieldScalar T>
PairIndex sample_pair(const ColumnMatrix<T>& a, SamplerKind kind, Xoshiro256& rng);

/// Ordered pair number k in [0, n(n-1)) in (i, then j) lexicographic order.
PairIndex pair_from_rank(std::uint64_t rank, std::size_t n);
std::uint64_t rank_of_pair(PairIndex pair, std::size_t n);

struct StepRecord {
    std::uint64_t t = 0;
    std::optional<PairIndex> pair;  // pair applied to A_{t-1}; absent at t = 0
    double inner_abs = 0.0;         // |<a_i, a_j>| in A_{t-1}
    double phi = 0.0;               // Phi(A_t)
    std::optional<MetricsSnapshot> snapshot;
};

struct ChainAbort {
    std::uint64_t step;  // the step that could not be taken
    std::string reason;
};

struct Trajectory {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    SamplerKind sampler = SamplerKind::uniform;
    std::vector<StepRecord> steps;
    std::optional<std::uint64_t> t_star;
    std::optional<ChainAbort> abort;
    // Steps where Phi rose by more than the monotonicity tolerance.
    std::size_t monotonicity_violations = 0;
    double max_phi_increase = 0.0;
};

struct ChainOptions {
    std::uint64_t steps = 0;
    SamplerKind sampler = SamplerKind::uniform;
    std::uint64_t seed = 0;
    // Full snapshot every `metrics_stride` steps (and at the last step); Phi every step.
    std::uint64_t metrics_stride = 1;
};

template <FieldScalar T>
struct ChainResult {
    Trajectory trajectory;
    ColumnMatrix<T> final_matrix;
};

/// A_0 = a0, A_{t+1} = orth(A_t, i_t, j_t). A degenerate pair or singular
/// state ends the run early with `trajectory.abort` set.
template <FieldScalar T>
ChainResult<T> run_chain(const ColumnMatrix<T>& a0, const ChainOptions& options);

/// First t with phi_t < (log 2 / 2) n.
std::optional<std::uint64_t> detect_t_star(const Trajectory& trajectory);

struct EnsembleRow {
    std::uint64_t t = 0;
    double mean_phi = 0.0;
    double min_phi = 0.0;
    double max_phi = 0.0;
    double stderr_phi = 0.0;
    double mean_log_kappa = 0.0;
    double theorem7_bound = 0.0;
    bool exceed = false;  // mean_phi - 2 stderr_phi > theorem7_bound
};

struct ReplicateSummary {
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> t_star;
    std::optional<ChainAbort> abort;
    std::size_t monotonicity_violations = 0;
    double final_phi = 0.0;
    double final_kappa = 1.0;
};

struct EnsembleStats {
    std::size_t n = 0;
    double phi0 = 0.0;
    double kappa0 = 1.0;
    std::size_t replicates = 0;  // replicates that finished
    std::size_t aborted = 0;
    std::vector<EnsembleRow> rows;
    std::vector<ReplicateSummary> summaries;  // one per requested replicate, by index
    std::vector<Trajectory> trajectories;     // filled only when requested

    std::size_t exceed_count() const;
    std::size_t monotonicity_violations() const;
};

struct EnsembleOptions {
    std::uint64_t steps = 0;
    SamplerKind sampler = SamplerKind::uniform;
    std::size_t replicates = 1;
    std::uint64_t base_seed = 0;
    std::uint64_t metrics_stride = 1;
    bool keep_trajectories = false;
    std::size_t threads = 0;  // 0: default_worker_count()
};

/// Thrown when more than 1% of replicates abort.
class EnsembleFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Runs `replicates` independent chains from a0; replicate r is seeded with
/// derive_seed(base_seed, Stream::replicate, r). Aggregates are reported at
/// every multiple of the stride and at the final step.
template <FieldScalar T>
EnsembleStats run_ensemble(const ColumnMatrix<T>& a0, const EnsembleOptions& options);

/// PAIRORTH_THREADS if set and positive, otherwise the hardware concurrency.
std::size_t default_worker_count();

// CSV
std::string trajectory_csv(const Trajectory& trajectory);
std::string ensemble_csv(const EnsembleStats& stats);

}  // namespace pairorth
