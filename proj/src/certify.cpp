#include "pairorth/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "pairorth/bounds.hpp"
#include "pairorth/generators.hpp"
#include "pairorth/matrix_io.hpp"
#include "pairorth/metrics.hpp"
#include "pairorth/oracle.hpp"
#include "pairorth/process.hpp"
#include "pairorth/random.hpp"
#include "pairorth/tolerances.hpp"

namespace pairorth::certify {

std::string_view to_string(Suite suite) {
    switch (suite) {
        case Suite::lemma3: return "lemma3";
        case Suite::lemma10: return "lemma10";
        case Suite::onestep: return "onestep";
        case Suite::eq9: return "eq9";
        case Suite::hadamard: return "hadamard";
        case Suite::kappa_sandwich: return "kappa-sandwich";
        case Suite::tstar_tail: return "tstar-tail";
    }
    return "lemma3";
}

Suite parse_suite(std::string_view text) {
    for (Suite s : {Suite::lemma3, Suite::lemma10, Suite::onestep, Suite::eq9, Suite::hadamard,
                    Suite::kappa_sandwich, Suite::tstar_tail}) {
        if (text == to_string(s)) return s;
    }
    throw UsageError("unknown verification suite '" + std::string(text) + "'");
}

namespace {

// One seeded random instance: dimension, field and conditioning all drawn
// from the trial seed.
struct Instance {
    AnyMatrix matrix;
    std::uint64_t seed;
};

enum class Conditioning { moderate, wide, near_orthogonal };

Instance draw_instance(std::uint64_t seed, std::size_t n_min, std::size_t n_max, Conditioning cond) {
    Xoshiro256 rng(seed);
    GeneratorSpec spec;
    spec.n = n_min + static_cast<std::size_t>(uniform_index(rng, n_max - n_min + 1));
    spec.field = uniform_index(rng, 2) == 0 ? Field::real : Field::complex;
    spec.seed = rng();
    const std::uint64_t shape = uniform_index(rng, 4);

    if (cond == Conditioning::near_orthogonal && shape < 2) {
        // Haar matrix plus a small Gaussian perturbation, so that 2 Phi < 1 is common.
        spec.kind = GeneratorKind::haar_orthonormal;
        const double scale = std::pow(10.0, -3.0 + 2.5 * uniform01(rng));
        Xoshiro256 noise(rng());
        auto perturb = [&](auto tag) -> AnyMatrix {
            using T = decltype(tag);
            auto q = generate<T>(spec).matrix.dense();
            for (Eigen::Index c = 0; c < q.cols(); ++c) {
                for (Eigen::Index r = 0; r < q.rows(); ++r) q(r, c) += T(scale * standard_normal(noise));
            }
            return ColumnMatrix<T>::build(std::move(q), true);
        };
        if (spec.field == Field::real) return {perturb(double{}), seed};
        return {perturb(std::complex<double>{}), seed};
    }
    if (shape == 0 || cond == Conditioning::moderate) {
        spec.kind = GeneratorKind::gaussian_normalized;
    } else {
        spec.kind = GeneratorKind::prescribed_spectrum;
        const double log_kappa = cond == Conditioning::wide ? 6.0 : 4.0;
        spec.sigma = geometric_spectrum(spec.n, std::pow(10.0, log_kappa * uniform01(rng)));
    }
    return {generate_any(spec), seed};
}

struct Tally {
    SuiteResult result;

    void record(bool pass, double margin, std::size_t trial, const Instance& inst,
                const std::string& detail) {
        ++result.checks;
        result.worst_margin = std::min(result.worst_margin, margin);
        if (pass) {
            ++result.passed;
        } else if (!result.first_failure) {
            result.first_failure = Failure{trial, inst.seed, detail, write_matrix_text(inst.matrix)};
        }
    }
};

std::string describe(double margin) {
    std::ostringstream s;
    s.precision(17);
    s << "margin " << margin;
    return s.str();
}

template <typename Check>
SuiteResult run_trials(Suite suite, std::size_t trials, std::uint64_t seed, std::size_t n_min,
                       std::size_t n_max, Conditioning cond, Check check) {
    Tally tally;
    tally.result.suite = suite;
    tally.result.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(seed, Stream::certification, trial);
        const Instance inst = draw_instance(trial_seed, n_min, n_max, cond);
        try {
            std::visit([&](const auto& a) { check(tally, trial, inst, a, trial_seed); }, inst.matrix);
        } catch (const std::exception& e) {
            tally.record(false, -std::numeric_limits<double>::infinity(), trial, inst, e.what());
        }
    }
    return tally.result;
}

SuiteResult lemma3_suite(std::size_t trials, std::uint64_t seed) {
    return run_trials(Suite::lemma3, trials, seed, 2, 6, Conditioning::moderate,
                      [](Tally& tally, std::size_t trial, const Instance& inst, const auto& a,
                         std::uint64_t trial_seed) {
                          Xoshiro256 rng(mix64(trial_seed));
                          const PairIndex pair = sample_pair(a, SamplerKind::uniform, rng);
                          const auto rep = oracle::verify_lemma3(a, pair);
                          const double phi_margin = rep.phi_before - rep.phi_after;
                          const double margin =
                              std::min({rep.monotone_margin, rep.ratio_margin, phi_margin});
                          const bool pass = rep.pass && phi_margin >= -tol::kMonotonicity;
                          tally.record(pass, margin, trial, inst, describe(margin));
                      });
}

SuiteResult lemma10_suite(std::size_t trials, std::uint64_t seed) {
    auto result = run_trials(
        Suite::lemma10, trials, seed, 2, 10, Conditioning::wide,
        [](Tally& tally, std::size_t trial, const Instance& inst, const auto& a, std::uint64_t trial_seed) {
            const double n = static_cast<double>(a.dim());
            const double gram = gram_offdiag_fro(a);
            const auto cond = condition_number(a);
            const double smin = cond.sigma(cond.sigma.size() - 1);
            const double rhs = n / (n - 1.0) * std::pow(1.0 - smin * smin, 2);
            const double margin = gram * gram - rhs;
            bool pass = margin >= -tol::kGramResidual;

            // The inequality is an equality for n = 2.
            Xoshiro256 rng(mix64(trial_seed));
            GeneratorSpec angle;
            angle.kind = GeneratorKind::two_by_two_angle;
            angle.theta = 0.05 + (std::numbers::pi - 0.1) * uniform01(rng);
            const auto m = generate<double>(angle).matrix;
            const double g2 = gram_offdiag_fro(m);
            const auto c2 = condition_number(m);
            const double s2 = c2.sigma(1);
            const double gap = std::abs(g2 * g2 - 2.0 * std::pow(1.0 - s2 * s2, 2));
            if (gap > 1e-10) pass = false;
            tally.record(pass, std::min(margin, -gap), trial, inst, describe(margin));
        });
    result.note = "includes n = 2 equality check per trial";
    return result;
}

SuiteResult onestep_suite(std::size_t trials, std::uint64_t seed) {
    return run_trials(Suite::onestep, trials, seed, 2, 6, Conditioning::moderate,
                      [](Tally& tally, std::size_t trial, const Instance& inst, const auto& a, std::uint64_t) {
                          const double phi = potential_phi(a);
                          const auto e = oracle::exact_one_step_expectation(a);
                          const double margin = f_map(phi, static_cast<int>(a.dim())) - e.mean;
                          const bool pass = margin >= -tol::kOneStep && e.successors == a.dim() * (a.dim() - 1);
                          tally.record(pass, margin, trial, inst, describe(margin));
                      });
}

SuiteResult eq9_suite(std::size_t trials, std::uint64_t seed) {
    return run_trials(
        Suite::eq9, trials, seed, 2, 8, Conditioning::wide,
        [](Tally& tally, std::size_t trial, const Instance& inst, const auto& a, std::uint64_t) {
            const auto inv_rows = leave_one_out_distances(a, DistanceMethod::inverse_rows);
            const auto proj = leave_one_out_distances(a, DistanceMethod::projection);
            double worst = 0.0;
            for (Eigen::Index j = 0; j < inv_rows.size(); ++j) {
                const double brute = oracle::brute_force_distance(a, static_cast<std::size_t>(j));
                worst = std::max({worst, std::abs(proj(j) - inv_rows(j)) / inv_rows(j),
                                  std::abs(brute - inv_rows(j)) / inv_rows(j)});
            }
            const double margin = tol::kDistanceAgreement - worst;
            tally.record(margin >= 0.0, margin, trial, inst, describe(margin));
        });
}

SuiteResult hadamard_suite(std::size_t trials, std::uint64_t seed) {
    return run_trials(Suite::hadamard, trials, seed, 2, 8, Conditioning::wide,
                      [](Tally& tally, std::size_t trial, const Instance& inst, const auto& a, std::uint64_t) {
                          const auto rep = hadamard_report(a);
                          double margin = std::numeric_limits<double>::infinity();
                          for (const auto& c : rep.checks) margin = std::min(margin, c.log_bound - c.log_value);
                          tally.record(rep.all_hold(), margin, trial, inst, describe(margin));
                      });
}

SuiteResult kappa_sandwich_suite(std::size_t trials, std::uint64_t seed) {
    std::size_t tight_cases = 0;
    auto result = run_trials(
        Suite::kappa_sandwich, trials, seed, 2, 10, Conditioning::near_orthogonal,
        [&tight_cases](Tally& tally, std::size_t trial, const Instance& inst, const auto& a, std::uint64_t) {
            const double phi = potential_phi(a);
            const double kappa = condition_number(a).kappa;
            const auto b = kappa_bounds_from_phi(phi, static_cast<int>(a.dim()));
            double margin = std::min(kappa - b.lower, b.upper_loose - kappa);
            if (b.upper_tight) {
                ++tight_cases;
                margin = std::min(margin, *b.upper_tight - kappa);
            }
            tally.record(margin >= -tol::kKappaSandwich, margin, trial, inst, describe(margin));
        });
    result.note = std::to_string(tight_cases) + " instances exercised the 2 phi < 1 bound";
    return result;
}

SuiteResult tstar_tail_suite(std::size_t replicates, std::uint64_t seed) {
    SuiteResult result;
    result.suite = Suite::tstar_tail;
    result.worst_margin = std::numeric_limits<double>::infinity();

    const RealMatrix a0 = tstar_instance(seed);
    const int n = static_cast<int>(a0.dim());
    const double phi0 = potential_phi(a0);
    const auto longest = stopping_tail(phi0, n, 3);

    EnsembleOptions opts;
    opts.steps = longest.threshold_steps + 1;
    opts.replicates = replicates;
    opts.base_seed = seed;
    opts.metrics_stride = opts.steps;
    const auto stats = run_ensemble(a0, opts);

    std::ostringstream note;
    note.precision(6);
    note << "phi0 = " << phi0 << ", replicates = " << stats.replicates;
    for (int c = 1; c <= 3; ++c) {
        const auto tail = stopping_tail(phi0, n, c);
        std::size_t exceed = 0;
        for (const auto& s : stats.summaries) {
            if (s.abort) continue;
            if (!s.t_star || *s.t_star > tail.threshold_steps) ++exceed;
        }
        const double empirical = static_cast<double>(exceed) / static_cast<double>(stats.replicates);
        const double allowance =
            tail.tail_prob + 3.0 * std::sqrt(tail.tail_prob / static_cast<double>(stats.replicates));
        const double margin = allowance - empirical;
        ++result.checks;
        result.worst_margin = std::min(result.worst_margin, margin);
        note << "; c = " << c << ": Pr(t* > " << tail.threshold_steps << ") = " << empirical
             << " <= " << allowance;
        if (margin >= 0.0) {
            ++result.passed;
        } else if (!result.first_failure) {
            result.first_failure =
                Failure{static_cast<std::size_t>(c), seed, "tail bound exceeded at c = " + std::to_string(c),
                        write_matrix_text(a0)};
        }
    }
    result.note = note.str();
    return result;
}

}  // namespace

RealMatrix tstar_instance(std::uint64_t seed) {
    Xoshiro256 rng(derive_seed(seed, Stream::generator, 0));
    for (int attempt = 0; attempt < 1000; ++attempt) {
        GeneratorSpec spec;
        spec.kind = GeneratorKind::near_singular;
        spec.n = 4;
        spec.seed = rng();
        spec.eta = std::exp(-2.0 - 3.0 * uniform01(rng));
        auto g = generate<double>(spec);
        if (g.achieved.phi >= 4.0 && g.achieved.phi <= 6.0) return std::move(g.matrix);
    }
    throw UsageError("could not draw an n = 4 instance with phi0 in [4, 6]");
}

SuiteResult run_suite(Suite suite, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw UsageError("trials must be positive");
    switch (suite) {
        case Suite::lemma3: return lemma3_suite(trials, seed);
        case Suite::lemma10: return lemma10_suite(trials, seed);
        case Suite::onestep: return onestep_suite(trials, seed);
        case Suite::eq9: return eq9_suite(trials, seed);
        case Suite::hadamard: return hadamard_suite(trials, seed);
        case Suite::kappa_sandwich: return kappa_sandwich_suite(trials, seed);
        case Suite::tstar_tail: return tstar_tail_suite(trials, seed);
    }
    throw UsageError("unknown suite");
}

}  // namespace pairorth::certify
