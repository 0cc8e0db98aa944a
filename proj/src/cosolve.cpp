#include "pairorth/cosolve.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "pairorth/bounds.hpp"
#include "pairorth/metrics.hpp"
#include "pairorth/random.hpp"
#include "pairorth/text_output.hpp"
#include "pairorth/tolerances.hpp"

namespace pairorth {

Interleave Interleave::parse(std::string_view text) {
    const auto colon = text.find(':');
    auto parse_part = [&](std::string_view part) {
        unsigned v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
            throw UsageError("interleave must look like p:q, got '" + std::string(text) + "'");
        }
        return v;
    };
    if (colon == std::string_view::npos) {
        throw UsageError("interleave must look like p:q, got '" + std::string(text) + "'");
    }
    Interleave r{parse_part(text.substr(0, colon)), parse_part(text.substr(colon + 1))};
    if (r.orth == 0 && r.kaczmarz == 0) throw UsageError("interleave 0:0 performs no work");
    return r;
}

std::string Interleave::str() const {
    return std::to_string(orth) + ":" + std::to_string(kaczmarz);
}

template <FieldScalar T>
CosolveState<T> CosolveState<T>::start(ColumnMatrix<T> a0, DenseVector<T> x_true) {
    if (static_cast<std::size_t>(x_true.size()) != a0.dim()) {
        throw UsageError("x_true length does not match the matrix dimension");
    }
    DenseVector<T> b = a0.dense().adjoint() * x_true;
    DenseVector<T> x = DenseVector<T>::Zero(x_true.size());
    return {std::move(a0), std::move(b), std::move(x), std::move(x_true)};
}

template <FieldScalar T>
double CosolveState<T>::preservation_residual() const {
    return (a.dense().adjoint() * x_true - b).norm();
}

template <FieldScalar T>
CosolveState<T> orth_with_rhs(const CosolveState<T>& state, PairIndex pair) {
    auto update = orth_update(state.a, pair);
    DenseVector<T> b = state.b;
    const auto i = static_cast<Eigen::Index>(pair.i);
    const auto j = static_cast<Eigen::Index>(pair.j);
    if constexpr (std::is_same_v<T, double>) {
        b(i) = (b(i) - update.coefficient * b(j)) / update.scale;
    } else {
        b(i) = (b(i) - std::conj(update.coefficient) * b(j)) / update.scale;
    }
    return {std::move(update.matrix), std::move(b), state.x, state.x_true};
}

template <FieldScalar T>
CosolveState<T> kaczmarz_step(const CosolveState<T>& state, std::size_t row) {
    if (row >= state.a.dim()) throw UsageError("kaczmarz_step: row out of range");
    const auto r = static_cast<Eigen::Index>(row);
    const auto a_row = state.a.column(row);
    CosolveState<T> next = state;
    next.x += (state.b(r) - inner(state.x, a_row)) * a_row;
    return next;
}

template <FieldScalar T>
CosolveResult<T> run_cosolve(const ColumnMatrix<T>& a0, const DenseVector<T>& x_true,
                             const CosolveOptions& options) {
    const std::size_t n = a0.dim();
    Xoshiro256 pair_rng(derive_seed(options.seed, Stream::orth_pairs, 0));
    Xoshiro256 row_rng(derive_seed(options.seed, Stream::kaczmarz_rows, 0));

    CosolveResult<T> result{{}, {}, CosolveState<T>::start(a0, x_true)};
    auto& state = result.final_state;
    double phi = potential_phi(state.a);
    result.initial_phi = phi;
    result.initial_error = state.error_norm();
    result.max_preservation_residual = state.preservation_residual();

    Trajectory& traj = result.trajectory;
    traj.n = n;
    traj.seed = options.seed;
    traj.sampler = SamplerKind::uniform;
    traj.steps.push_back(StepRecord{0, std::nullopt, 0.0, phi, std::nullopt});
    const double threshold = inflection_threshold(static_cast<int>(n));
    if (phi < threshold) traj.t_star = 0;

    if (options.stop_error && result.initial_error <= *options.stop_error) {
        result.reached_stop_error = true;
        return result;
    }

    const std::uint64_t cycle = options.interleave.orth + options.interleave.kaczmarz;
    for (std::uint64_t step = 1; step <= options.steps; ++step) {
        const bool orth = (step - 1) % cycle < options.interleave.orth;
        if (orth) {
            const PairIndex pair = sample_pair(state.a, SamplerKind::uniform, pair_rng);
            const double inner_abs = std::abs(inner(state.a.column(pair.i), state.a.column(pair.j)));
            state = orth_with_rhs(state, pair);
            const double next_phi = potential_phi(state.a);
            ++result.orth_steps;
            const double rise = next_phi - phi;
            traj.max_phi_increase = std::max(traj.max_phi_increase, rise);
            if (rise > tol::kMonotonicity) ++traj.monotonicity_violations;
            phi = next_phi;
            traj.steps.push_back(StepRecord{result.orth_steps, pair, inner_abs, phi, std::nullopt});
            if (!traj.t_star && phi < threshold) traj.t_star = result.orth_steps;
        } else {
            const auto row = static_cast<std::size_t>(uniform_index(row_rng, n));
            state = kaczmarz_step(state, row);
            ++result.kaczmarz_steps;
            const auto r = static_cast<Eigen::Index>(row);
            result.max_kaczmarz_residual =
                std::max(result.max_kaczmarz_residual,
                         std::abs(inner(state.x, state.a.column(row)) - state.b(r)));
        }
        result.max_preservation_residual =
            std::max(result.max_preservation_residual, state.preservation_residual());
        const double err = state.error_norm();
        result.history.push_back(
            CosolveRecord{step, orth ? CosolveKind::orth : CosolveKind::kaczmarz, err, phi});
        if (options.stop_error && err <= *options.stop_error) {
            result.reached_stop_error = true;
            break;
        }
    }
    return result;
}

std::string cosolve_csv(const std::vector<CosolveRecord>& history) {
    std::string out = "step,kind,err_norm,phi\n";
    for (const auto& rec : history) {
        out += std::to_string(rec.step) + ',' + (rec.kind == CosolveKind::orth ? "orth" : "kacz") +
               ',' + format_double(rec.err_norm) + ',' + format_double(rec.phi) + '\n';
    }
    return out;
}

#define PAIRORTH_INSTANTIATE(T)                                                                 \
    template struct CosolveState<T>;                                                            \
    template CosolveState<T> orth_with_rhs(const CosolveState<T>&, PairIndex);                  \
    template CosolveState<T> kaczmarz_step(const CosolveState<T>&, std::size_t);                \
    template CosolveResult<T> run_cosolve(const ColumnMatrix<T>&, const DenseVector<T>&,        \
                                          const CosolveOptions&);

PAIRORTH_INSTANTIATE(double)
PAIRORTH_INSTANTIATE(std::complex<double>)

#undef PAIRORTH_INSTANTIATE

}  // namespace pairorth
