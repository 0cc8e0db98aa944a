#include "pairorth/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pairorth/bounds.hpp"
#include "pairorth/certify.hpp"
#include "pairorth/cli/config.hpp"
#include "pairorth/cosolve.hpp"
#include "pairorth/generators.hpp"
#include "pairorth/matrix_io.hpp"
#include "pairorth/metrics.hpp"
#include "pairorth/process.hpp"
#include "pairorth/random.hpp"
#include "pairorth/text_output.hpp"
#include "pairorth/tolerances.hpp"

namespace pairorth::cli {
namespace fs = std::filesystem;

namespace {

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

// Registers one string-valued --flag per config key; `values` receives whatever was given.
void add_config_flags(CLI::App* app, KeyValues& values, std::string& config_path) {
    app->add_option("--config", config_path, "key = value configuration file");
    for (const auto& key : config_keys()) app->add_option(dashed(key), values[key]);
}

// Config file first, then any flags given on the command line.
ExperimentConfig load_config(const CLI::App* app, const KeyValues& flags, const std::string& config_path) {
    KeyValues merged;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw UsageError("cannot open config file '" + config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        merged = parse_key_values(buf.str());
    }
    for (const auto& [key, value] : flags) {
        if (app->count(dashed(key)) > 0) merged[key] = value;
    }
    auto config = config_from_key_values(merged);
    validate(config);
    return config;
}

AnyMatrix initial_matrix(const ExperimentConfig& config) {
    if (config.input) return load_matrix(*config.input);
    return generate_any(resolved_generator(config));
}

void require_seed(const ExperimentConfig& config) {
    if (!config.seed) throw UsageError("config field 'seed': stochastic commands require --seed");
}

std::string summary_text(const ExperimentConfig& config, const EnsembleStats& stats, Field field) {
    std::ostringstream out;
    auto kv = [&out](std::string_view key, const auto& value) { out << key << " = " << value << '\n'; };
    kv("n", stats.n);
    kv("field", to_string(field));
    kv("generator", config.input ? std::string("file") : std::string(to_string(config.generator.kind)));
    kv("sampler", to_string(config.sampler));
    kv("steps", config.steps);
    kv("replicates", config.replicates);
    kv("seed", *config.seed);
    kv("phi0", format_double(stats.phi0));
    kv("kappa0", format_double(stats.kappa0));
    kv("inflection", format_double(inflection_threshold(static_cast<int>(stats.n))));

    std::vector<double> crossings;
    for (const auto& s : stats.summaries) {
        if (!s.abort && s.t_star) crossings.push_back(static_cast<double>(*s.t_star));
    }
    kv("t_star_count", crossings.size());
    if (!crossings.empty()) {
        double sum = 0.0;
        for (double t : crossings) sum += t;
        kv("t_star_mean", format_double(sum / static_cast<double>(crossings.size())));
        kv("t_star_min", format_double(*std::min_element(crossings.begin(), crossings.end())));
        kv("t_star_max", format_double(*std::max_element(crossings.begin(), crossings.end())));
    }
    const auto& last = stats.rows.back();
    kv("final_mean_phi", format_double(last.mean_phi));
    kv("final_max_phi", format_double(last.max_phi));
    kv("final_mean_log_kappa", format_double(last.mean_log_kappa));
    double max_kappa = 1.0;
    for (const auto& s : stats.summaries) {
        if (!s.abort) max_kappa = std::max(max_kappa, s.final_kappa);
    }
    kv("final_max_kappa", format_double(max_kappa));
    kv("bound_exceed_count", stats.exceed_count());
    kv("monotonicity_violations", stats.monotonicity_violations());
    kv("aborted", stats.aborted);
    return out.str();
}

int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
    require_seed(config);
    const AnyMatrix a0 = initial_matrix(config);

    EnsembleOptions opts;
    opts.steps = config.steps;
    opts.sampler = config.sampler;
    opts.replicates = config.replicates;
    opts.base_seed = *config.seed;
    opts.metrics_stride = config.metrics_stride;
    opts.keep_trajectories = config.emit.contains(Emit::trajectory);

    EnsembleStats stats;
    try {
        stats = std::visit([&](const auto& a) { return run_ensemble(a, opts); }, a0);
    } catch (const EnsembleFailure& e) {
        err << "run failed: " << e.what() << '\n';
        return kExitViolation;
    }

    fs::create_directories(config.output_dir);
    if (config.emit.contains(Emit::ensemble)) {
        write_file_atomic(config.output_dir / "ensemble.csv", ensemble_csv(stats));
    }
    if (config.emit.contains(Emit::trajectory)) {
        for (std::size_t r = 0; r < stats.trajectories.size(); ++r) {
            char name[40];
            std::snprintf(name, sizeof name, "trajectory_r%04zu.csv", r);
            write_file_atomic(config.output_dir / name, trajectory_csv(stats.trajectories[r]));
        }
    }
    const std::string summary = summary_text(config, stats, field(a0));
    if (config.emit.contains(Emit::summary)) {
        write_file_atomic(config.output_dir / "summary.txt", summary);
    }
    out << summary;

    // A rising potential is reported but does not fail the run: single steps can
    // legitimately increase it when the target column's distance shrinks.
    if (const auto rises = stats.monotonicity_violations(); rises > 0) {
        err << "note: " << rises << " steps increased phi by more than "
            << format_double(tol::kMonotonicity) << '\n';
    }
    if (stats.aborted > 0) err << "note: " << stats.aborted << " replicates aborted\n";
    if (const auto exceed = stats.exceed_count(); exceed > 0) {
        err << "invariant violation: mean phi exceeds the convergence bound at " << exceed
            << " recorded steps\n";
        return kExitViolation;
    }
    return kExitOk;
}

int cmd_cosolve(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
    require_seed(config);
    const AnyMatrix a0 = initial_matrix(config);
    CosolveOptions opts{config.interleave, config.steps, *config.seed, config.stop_error};

    return std::visit(
        [&](const auto& a) {
            using T = typename std::decay_t<decltype(a)>::Scalar;
            Xoshiro256 rng(derive_seed(*config.seed, Stream::generator, 1));
            DenseVector<T> x_true(static_cast<Eigen::Index>(a.dim()));
            for (auto& v : x_true) {
                if constexpr (std::is_same_v<T, double>) {
                    v = standard_normal(rng);
                } else {
                    const double re = standard_normal(rng);
                    v = T(re, standard_normal(rng));
                }
            }
            const auto result = run_cosolve(a, x_true, opts);
            fs::create_directories(config.output_dir);
            write_file_atomic(config.output_dir / "cosolve.csv", cosolve_csv(result.history));

            std::ostringstream s;
            s << "n = " << a.dim() << '\n'
              << "interleave = " << config.interleave.str() << '\n'
              << "initial_error = " << format_double(result.initial_error) << '\n'
              << "final_error = " << format_double(result.final_state.error_norm()) << '\n'
              << "initial_phi = " << format_double(result.initial_phi) << '\n'
              << "final_phi = " << format_double(result.trajectory.steps.back().phi) << '\n'
              << "orth_steps = " << result.orth_steps << '\n'
              << "kaczmarz_steps = " << result.kaczmarz_steps << '\n'
              << "reached_stop_error = " << (result.reached_stop_error ? "true" : "false") << '\n'
              << "max_preservation_residual = " << format_double(result.max_preservation_residual)
              << '\n';
            write_file_atomic(config.output_dir / "cosolve_summary.txt", s.str());
            out << s.str();
            if (result.max_preservation_residual > tol::kSolutionPreservation) {
                err << "invariant violation: x_true no longer solves the updated system\n";
                return kExitViolation;
            }
            return kExitOk;
        },
        a0);
}

struct BoundFlags {
    std::optional<double> x, phi0, phi, t, eps, delta;
    std::optional<int> n, c;
};

template <typename V>
V need(const std::optional<V>& v, const char* flag) {
    if (!v) throw UsageError(std::string("missing ") + flag);
    return *v;
}

int cmd_bounds(const std::string& name, const BoundFlags& f, std::ostream& out, std::ostream& err) {
    auto print = [&out](double v) { out << format_double(v) << '\n'; };
    if (name == "f") {
        print(f_map(need(f.x, "--x"), need(f.n, "--n")));
    } else if (name == "theorem7") {
        print(theorem7_bound(need(f.phi0, "--phi0"), need(f.n, "--n"), need(f.t, "--t")));
    } else if (name == "kappa") {
        const auto b = kappa_bounds_from_phi(need(f.phi, "--phi"), need(f.n, "--n"));
        out << "lower " << format_double(b.lower) << '\n'
            << "upper_loose " << format_double(b.upper_loose) << '\n'
            << "upper_tight " << (b.upper_tight ? format_double(*b.upper_tight) : "absent") << '\n';
    } else if (name == "stopping-tail") {
        const auto s = stopping_tail(need(f.phi0, "--phi0"), need(f.n, "--n"), need(f.c, "--c"));
        out << "threshold_steps " << s.threshold_steps << '\n'
            << "tail_prob " << format_double(s.tail_prob) << '\n';
    } else if (name == "prop-a0") {
        print(prop_a0_bound(need(f.phi0, "--phi0"), need(f.n, "--n"), need(f.t, "--t")));
    } else if (name == "theorem1-steps") {
        const ConvergenceTarget target(need(f.eps, "--eps"), need(f.delta, "--delta"));
        out << theorem1_steps(need(f.phi0, "--phi0"), need(f.n, "--n"), target) << '\n';
        if (!target.in_stated_regime()) {
            err << "warning: eps and delta outside (0, 0.01); the step count is not guaranteed there\n";
        }
    } else if (name == "c-n") {
        print(BoundParams::for_dimension(need(f.n, "--n")).c_n);
    } else if (name == "inflection") {
        print(inflection_threshold(need(f.n, "--n")));
    } else {
        throw UsageError("unknown bound '" + name + "'");
    }
    return kExitOk;
}

std::size_t default_trials(certify::Suite suite) {
    switch (suite) {
        case certify::Suite::lemma3: return 10000;
        case certify::Suite::onestep: return 200;
        case certify::Suite::eq9: return 500;
        case certify::Suite::tstar_tail: return 200;
        default: return 1000;
    }
}

int cmd_verify(const std::string& suite_name, std::optional<std::size_t> trials,
               std::optional<std::uint64_t> seed, const fs::path& out_dir, std::ostream& out,
               std::ostream& err) {
    const auto suite = certify::parse_suite(suite_name);
    if (!seed) throw UsageError("verify requires --seed");
    const auto result = certify::run_suite(suite, trials.value_or(default_trials(suite)), *seed);
    out << "suite " << certify::to_string(suite) << ": " << result.passed << "/" << result.checks
        << " passed, worst margin " << format_double(result.worst_margin) << '\n';
    if (!result.note.empty()) out << "  " << result.note << '\n';
    if (result.ok()) return kExitOk;

    const auto& failure = *result.first_failure;
    fs::create_directories(out_dir);
    const fs::path dump = out_dir / ("verify-" + std::string(certify::to_string(suite)) + "-failure.txt");
    write_file_atomic(dump, failure.matrix_text);
    err << "FAIL " << certify::to_string(suite) << " trial " << failure.trial << " (instance seed "
        << failure.seed << "): " << failure.detail << "; matrix written to " << dump.string() << '\n';
    return kExitViolation;
}

int cmd_gen(const ExperimentConfig& config, const fs::path& out_path, std::ostream& out) {
    const bool random_kind = config.generator.kind != GeneratorKind::two_by_two_angle;
    if (random_kind) require_seed(config);
    const GeneratorSpec spec = resolved_generator(config);
    const AnyMatrix a = generate_any(spec);
    save_matrix(out_path, a);
    std::visit(
        [&](const auto& m) {
            const auto s = snapshot(m);
            out << "phi = " << format_double(s.phi) << '\n'
                << "kappa = " << format_double(s.kappa) << '\n'
                << "min_d = " << format_double(s.d.minCoeff()) << '\n';
        },
        a);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Randomized pairwise orthogonalization: simulation, bounds and verification"};
    app.require_subcommand(1);

    KeyValues run_flags, cosolve_flags, gen_flags;
    std::string run_config, cosolve_config, gen_config;

    auto* run = app.add_subcommand("run", "Run a seeded ensemble of chains and write CSV + summary");
    add_config_flags(run, run_flags, run_config);

    auto* cosolve = app.add_subcommand("cosolve", "Kaczmarz solve with concurrent orthogonalization");
    add_config_flags(cosolve, cosolve_flags, cosolve_config);

    auto* gen = app.add_subcommand("gen", "Generate a matrix file");
    std::string gen_out;
    std::string gen_kind;
    gen->add_option("--kind", gen_kind, "generator kind");
    for (const char* key : {"gen", "n", "field", "theta", "eta", "sigma", "kappa", "seed"}) {
        gen->add_option(dashed(key), gen_flags[key]);
    }
    gen->add_option("--out", gen_out, "output matrix file")->required();

    auto* bounds = app.add_subcommand("bounds", "Evaluate a closed-form bound");
    std::string bound_name;
    BoundFlags bf;
    bounds->add_option("name", bound_name,
                       "f | theorem7 | kappa | stopping-tail | prop-a0 | theorem1-steps | c-n | inflection")
        ->required();
    bounds->add_option("--x", bf.x);
    bounds->add_option("--n", bf.n);
    bounds->add_option("--phi0", bf.phi0);
    bounds->add_option("--phi", bf.phi);
    bounds->add_option("--t", bf.t);
    bounds->add_option("--c", bf.c);
    bounds->add_option("--eps", bf.eps);
    bounds->add_option("--delta", bf.delta);

    auto* verify = app.add_subcommand("verify", "Run a randomized certification suite");
    std::string suite_name;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> verify_seed;
    std::string verify_out = ".";
    verify->add_option("suite", suite_name,
                       "lemma3 | lemma10 | onestep | eq9 | hadamard | kappa-sandwich | tstar-tail")
        ->required();
    verify->add_option("--trials", trials);
    verify->add_option("--seed", verify_seed);
    verify->add_option("--out", verify_out, "directory for failure dumps");

    std::vector<std::string> storage{"pairorth"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) return cmd_run(load_config(run, run_flags, run_config), out, err);
        if (*cosolve) return cmd_cosolve(load_config(cosolve, cosolve_flags, cosolve_config), out, err);
        if (*gen) {
            KeyValues given;
            for (const auto& [key, value] : gen_flags) {
                if (gen->count(dashed(key)) > 0) given[key] = value;
            }
            if (gen->count("--kind") > 0) given["gen"] = gen_kind;
            auto config = config_from_key_values(given);
            validate(config);
            return cmd_gen(config, gen_out, out);
        }
        if (*bounds) return cmd_bounds(bound_name, bf, out, err);
        if (*verify) return cmd_verify(suite_name, trials, verify_seed, verify_out, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConstructionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace pairorth::cli
