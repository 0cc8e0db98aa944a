#include "pairorth/process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <atomic>
#include <sstream>
#include <thread>

#include "pairorth/bounds.hpp"
#include "pairorth/text_output.hpp"
#include "pairorth/tolerances.hpp"

namespace pairorth {

std::string_view to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::uniform: return "uniform";
        case SamplerKind::proportional: return "proportional";
        case SamplerKind::greedy: return "greedy";
    }
    return "uniform";
}

SamplerKind parse_sampler(std::string_view text) {
    if (text == "uniform") return SamplerKind::uniform;
    if (text == "proportional") return SamplerKind::proportional;
    if (text == "greedy") return SamplerKind::greedy;
    throw UsageError("unknown sampler '" + std::string(text) + "'");
}

PairIndex pair_from_rank(std::uint64_t rank, std::size_t n) {
    const std::size_t i = rank / (n - 1);
    const std::size_t r = rank % (n - 1);
    return {i, r < i ? r : r + 1};
}

std::uint64_t rank_of_pair(PairIndex pair, std::size_t n) {
    return pair.i * (n - 1) + (pair.j < pair.i ? pair.j : pair.j - 1);
}

namespace {

// |<a_i, a_j>| for i < j, packed row by row. Computing each unordered pair
// once keeps |<a_i, a_j>| and |<a_j, a_i>| exactly equal.
template <FieldScalar T>
std::vector<double> pair_magnitudes(const ColumnMatrix<T>& a) {
    const std::size_t n = a.dim();
    std::vector<double> mags;
    mags.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) mags.push_back(std::abs(inner(a.column(i), a.column(j))));
    }
    return mags;
}

std::size_t packed_index(std::size_t i, std::size_t j, std::size_t n) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

PairIndex sample_uniform(std::size_t n, Xoshiro256& rng) {
    return pair_from_rank(uniform_index(rng, n * (n - 1)), n);
}

}  // namespace

template <FieldScalar T>
PairIndex sample_pair(const ColumnMatrix<T>& a, SamplerKind kind, Xoshiro256& rng) {
    const std::size_t n = a.dim();
    if (kind == SamplerKind::uniform) return sample_uniform(n, rng);

    const auto mags = pair_magnitudes(a);
    if (kind == SamplerKind::greedy) {
        PairIndex best{0, 1};
        double best_mag = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double m = mags[packed_index(i, j, n)];
                if (m > best_mag) {
                    best_mag = m;
                    best = {i, j};
                }
            }
        }
        return best;
    }

    const double largest = *std::max_element(mags.begin(), mags.end());
    if (largest < tol::kProportionalFloor) return sample_uniform(n, rng);

    double total = 0.0;
    for (double m : mags) total += 2.0 * m * m;
    const double target = uniform01(rng) * total;
    double cumulative = 0.0;
    PairIndex last{0, 1};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double m = mags[packed_index(i, j, n)];
            if (m == 0.0) continue;
            cumulative += m * m;
            last = {i, j};
            if (target < cumulative) return last;
        }
    }
    return last;
}

template <FieldScalar T>
ChainResult<T> run_chain(const ColumnMatrix<T>& a0, const ChainOptions& options) {
    if (options.metrics_stride < 1) throw UsageError("metrics_stride must be at least 1");
    Trajectory traj;
    traj.n = a0.dim();
    traj.seed = options.seed;
    traj.sampler = options.sampler;
    traj.steps.reserve(static_cast<std::size_t>(options.steps) + 1);

    Xoshiro256 rng(options.seed);
    ColumnMatrix<T> current = a0;
    const double threshold = inflection_threshold(static_cast<int>(traj.n));
    auto wants_snapshot = [&](std::uint64_t t) {
        return t % options.metrics_stride == 0 || t == options.steps;
    };

    {
        StepRecord first;
        if (wants_snapshot(0)) {
            first.snapshot = snapshot(current);
            first.phi = first.snapshot->phi;
        } else {
            first.phi = potential_phi(current);
        }
        traj.steps.push_back(std::move(first));
    }
    if (traj.steps.back().phi < threshold) traj.t_star = 0;

    for (std::uint64_t t = 1; t <= options.steps; ++t) {
        StepRecord rec;
        rec.t = t;
        try {
            const PairIndex pair = sample_pair(current, options.sampler, rng);
            auto update = orth_update(current, pair);
            rec.pair = pair;
            rec.inner_abs = update.inner_abs;
            current = std::move(update.matrix);
            if (wants_snapshot(t)) {
                rec.snapshot = snapshot(current);
                rec.phi = rec.snapshot->phi;
            } else {
                rec.phi = potential_phi(current);
            }
        } catch (const DegeneratePairError& e) {
            traj.abort = ChainAbort{t, e.what()};
            break;
        } catch (const SingularityError& e) {
            traj.abort = ChainAbort{t, e.what()};
            break;
        }
        const double rise = rec.phi - traj.steps.back().phi;
        traj.max_phi_increase = std::max(traj.max_phi_increase, rise);
        if (rise > tol::kMonotonicity) ++traj.monotonicity_violations;
        if (!traj.t_star && rec.phi < threshold) traj.t_star = t;
        traj.steps.push_back(std::move(rec));
    }
    return {std::move(traj), std::move(current)};
}

std::optional<std::uint64_t> detect_t_star(const Trajectory& trajectory) {
    if (trajectory.steps.empty()) throw UsageError("detect_t_star: empty trajectory");
    const double threshold = inflection_threshold(static_cast<int>(trajectory.n));
    for (const auto& rec : trajectory.steps) {
        if (rec.phi < threshold) return rec.t;
    }
    return std::nullopt;
}

std::size_t EnsembleStats::exceed_count() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.exceed; }));
}

std::size_t EnsembleStats::monotonicity_violations() const {
    std::size_t total = 0;
    for (const auto& s : summaries) total += s.monotonicity_violations;
    return total;
}

std::size_t default_worker_count() {
    if (const char* env = std::getenv("PAIRORTH_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Per-replicate values at each recorded step.
struct ReplicateSeries {
    std::vector<double> phi;
    std::vector<double> log_kappa;
};

}  // namespace

template <FieldScalar T>
EnsembleStats run_ensemble(const ColumnMatrix<T>& a0, const EnsembleOptions& options) {
    if (options.replicates < 1) throw UsageError("replicates must be at least 1");
    if (options.metrics_stride < 1) throw UsageError("metrics_stride must be at least 1");

    std::vector<std::uint64_t> recorded;
    for (std::uint64_t t = 0; t <= options.steps; t += options.metrics_stride) recorded.push_back(t);
    if (recorded.back() != options.steps) recorded.push_back(options.steps);

    const std::size_t reps = options.replicates;
    std::vector<ReplicateSeries> series(reps);
    std::vector<ReplicateSummary> summaries(reps);
    std::vector<Trajectory> kept(options.keep_trajectories ? reps : 0);
    std::vector<std::exception_ptr> errors(reps);

    auto work = [&](std::size_t r) {
        try {
            ChainOptions chain{options.steps, options.sampler,
                               derive_seed(options.base_seed, Stream::replicate, r),
                               options.metrics_stride};
            auto result = run_chain(a0, chain);
            const Trajectory& traj = result.trajectory;
            ReplicateSummary& s = summaries[r];
            s.seed = chain.seed;
            s.t_star = traj.t_star;
            s.abort = traj.abort;
            s.monotonicity_violations = traj.monotonicity_violations;
            s.final_phi = traj.steps.back().phi;
            if (!traj.abort) {
                s.final_kappa = traj.steps.back().snapshot->kappa;
                auto& out = series[r];
                out.phi.reserve(recorded.size());
                out.log_kappa.reserve(recorded.size());
                for (std::uint64_t t : recorded) {
                    const auto& rec = traj.steps[static_cast<std::size_t>(t)];
                    out.phi.push_back(rec.phi);
                    out.log_kappa.push_back(std::log(rec.snapshot->kappa));
                }
            }
            if (options.keep_trajectories) kept[r] = std::move(result.trajectory);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    };

    const std::size_t workers =
        std::min(reps, options.threads ? options.threads : default_worker_count());
    if (workers <= 1) {
        for (std::size_t r = 0; r < reps; ++r) work(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < reps; r = next++) work(r);
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    EnsembleStats stats;
    stats.n = a0.dim();
    const auto initial = snapshot(a0);
    stats.phi0 = initial.phi;
    stats.kappa0 = initial.kappa;
    for (const auto& s : summaries) {
        if (s.abort) ++stats.aborted;
    }
    if (static_cast<double>(stats.aborted) > tol::kMaxAbortFraction * static_cast<double>(reps)) {
        std::ostringstream msg;
        msg << stats.aborted << " of " << reps << " replicates aborted";
        for (std::size_t r = 0; r < reps; ++r) {
            if (summaries[r].abort) {
                msg << "; first: replicate " << r << " at step " << summaries[r].abort->step << ": "
                    << summaries[r].abort->reason;
                break;
            }
        }
        throw EnsembleFailure(msg.str());
    }
    stats.replicates = reps - stats.aborted;

    const int n = static_cast<int>(stats.n);
    for (std::size_t k = 0; k < recorded.size(); ++k) {
        EnsembleRow row;
        row.t = recorded[k];
        row.min_phi = std::numeric_limits<double>::infinity();
        row.max_phi = -std::numeric_limits<double>::infinity();
        double sum = 0.0, sum_log_kappa = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            if (summaries[r].abort) continue;
            const double phi = series[r].phi[k];
            sum += phi;
            sum_log_kappa += series[r].log_kappa[k];
            row.min_phi = std::min(row.min_phi, phi);
            row.max_phi = std::max(row.max_phi, phi);
        }
        const double count = static_cast<double>(stats.replicates);
        row.mean_phi = sum / count;
        // Keep min <= mean <= max despite rounding in the sum.
        row.mean_phi = std::clamp(row.mean_phi, row.min_phi, row.max_phi);
        row.mean_log_kappa = sum_log_kappa / count;
        if (stats.replicates > 1) {
            double ss = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                if (summaries[r].abort) continue;
                const double dev = series[r].phi[k] - row.mean_phi;
                ss += dev * dev;
            }
            row.stderr_phi = std::sqrt(ss / (count - 1.0) / count);
        }
        row.theorem7_bound = theorem7_bound(stats.phi0, n, static_cast<double>(row.t));
        row.exceed = row.mean_phi - 2.0 * row.stderr_phi > row.theorem7_bound;
        stats.rows.push_back(row);
    }
    stats.summaries = std::move(summaries);
    stats.trajectories = std::move(kept);
    return stats;
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "t,pair_i,pair_j,inner_abs,phi,sigma_min,kappa,gram_offdiag\n";
    for (const auto& rec : trajectory.steps) {
        out += std::to_string(rec.t);
        out += ',';
        if (rec.pair) {
            out += std::to_string(rec.pair->i) + ',' + std::to_string(rec.pair->j) + ',' +
                   format_double(rec.inner_abs);
        } else {
            out += ",,";
        }
        out += ',' + format_double(rec.phi);
        if (rec.snapshot) {
            const auto& s = *rec.snapshot;
            out += ',' + format_double(s.sigma(s.sigma.size() - 1)) + ',' + format_double(s.kappa) +
                   ',' + format_double(s.gram_offdiag);
        } else {
            out += ",,,";
        }
        out += '\n';
    }
    return out;
}

std::string ensemble_csv(const EnsembleStats& stats) {
    std::string out = "t,mean_phi,min_phi,max_phi,stderr_phi,theorem7_bound,exceed_flag,mean_log_kappa\n";
    for (const auto& row : stats.rows) {
        out += std::to_string(row.t) + ',' + format_double(row.mean_phi) + ',' +
               format_double(row.min_phi) + ',' + format_double(row.max_phi) + ',' +
               format_double(row.stderr_phi) + ',' + format_double(row.theorem7_bound) + ',' +
               (row.exceed ? "1" : "0") + ',' + format_double(row.mean_log_kappa) + '\n';
    }
    return out;
}

#define PAIRORTH_INSTANTIATE(T)                                                            \
    template PairIndex sample_pair(const ColumnMatrix<T>&, SamplerKind, Xoshiro256&);      \
    template ChainResult<T> run_chain(const ColumnMatrix<T>&, const ChainOptions&);        \
    template EnsembleStats run_ensemble(const ColumnMatrix<T>&, const EnsembleOptions&);

PAIRORTH_INSTANTIATE(double)
PAIRORTH_INSTANTIATE(std::complex<double>)

#undef PAIRORTH_INSTANTIATE

}  // namespace pairorth
