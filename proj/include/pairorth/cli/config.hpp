#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "pairorth/cosolve.hpp"
#include "pairorth/generators.hpp"
#include "pairorth/process.hpp"

namespace pairorth::cli {

enum class Emit { trajectory, ensemble, summary };

/// Everything a `run` or `cosolve` invocation needs. Text form: flat
/// `key = value` lines, `#` starts a comment; every key is also a `--flag`.
struct ExperimentConfig {
    GeneratorSpec generator;              // generator.seed is derived from `seed`
    std::optional<double> kappa;          // prescribed_spectrum: geometric spectrum to this kappa
    std::optional<std::filesystem::path> input;  // start from a matrix file instead of a generator
    SamplerKind sampler = SamplerKind::uniform;
    std::uint64_t steps = 1000;
    std::size_t replicates = 1;
    std::uint64_t metrics_stride = 100;
    std::optional<std::uint64_t> seed;
    std::filesystem::path output_dir = ".";
    std::set<Emit> emit = {Emit::ensemble, Emit::summary};
    Interleave interleave;
    std::optional<double> stop_error;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Ordered key -> raw value map, the common currency of files and flags.
using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` text. Throws UsageError naming the line on malformed input.
KeyValues parse_key_values(const std::string& text);

/// Builds a config from raw values. Throws UsageError naming the offending key.
ExperimentConfig config_from_key_values(const KeyValues& values);

/// Canonical text form; config_from_key_values(parse_key_values(to_text(c))) == c.
std::string to_text(const ExperimentConfig& config);

/// Keys understood by config_from_key_values.
const std::set<std::string>& config_keys();

/// Validates field combinations (steps >= 1, replicates >= 1, spectrum inputs).
void validate(const ExperimentConfig& config);

/// Generator spec with its seed derived from config.seed and any kappa shortcut applied.
GeneratorSpec resolved_generator(const ExperimentConfig& config);

}  // namespace pairorth::cli
