#include "pairorth/cli/config.hpp"

#include <charconv>
#include <sstream>

#include "pairorth/random.hpp"
#include "pairorth/text_output.hpp"

namespace pairorth::cli {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string_view to_string(Emit e) {
    switch (e) {
        case Emit::trajectory: return "trajectory";
        case Emit::ensemble: return "ensemble";
        case Emit::summary: return "summary";
    }
    return "summary";
}

Emit parse_emit(std::string_view text) {
    if (text == "trajectory") return Emit::trajectory;
    if (text == "ensemble") return Emit::ensemble;
    if (text == "summary") return Emit::summary;
    throw UsageError("unknown emit target '" + std::string(text) + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw UsageError("not a non-negative integer: '" + text + "'");
    }
    return v;
}

// Rethrows any parse failure with the key name attached.
template <typename F>
void with_key(const std::string& key, F&& apply) {
    try {
        apply();
    } catch (const UsageError& e) {
        throw UsageError("config field '" + key + "': " + e.what());
    }
}

}  // namespace

const std::set<std::string>& config_keys() {
    static const std::set<std::string> keys = {
        "gen",        "n",    "field", "theta", "eta",  "sigma",      "kappa",     "input", "sampler",
        "steps",      "replicates", "stride", "seed", "out", "emit", "interleave", "stop_error"};
    return keys;
}

KeyValues parse_key_values(const std::string& text) {
    KeyValues values;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (!config_keys().contains(key)) {
            throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        values[key] = trim(std::string_view(body).substr(eq + 1));
    }
    return values;
}

ExperimentConfig config_from_key_values(const KeyValues& values) {
    ExperimentConfig c;
    for (const auto& [key, value] : values) {
        with_key(key, [&, &key = key, &value = value] {
            if (key == "gen") {
                c.generator.kind = parse_generator(value);
            } else if (key == "n") {
                c.generator.n = static_cast<std::size_t>(parse_u64(value));
            } else if (key == "field") {
                c.generator.field = parse_field(value);
            } else if (key == "theta") {
                c.generator.theta = parse_double(value);
            } else if (key == "eta") {
                c.generator.eta = parse_double(value);
            } else if (key == "sigma") {
                c.generator.sigma.clear();
                for (const auto& s : split_list(value)) c.generator.sigma.push_back(parse_double(s));
            } else if (key == "kappa") {
                c.kappa = parse_double(value);
            } else if (key == "input") {
                if (value.empty()) throw UsageError("empty path");
                c.input = value;
            } else if (key == "sampler") {
                c.sampler = parse_sampler(value);
            } else if (key == "steps") {
                c.steps = parse_u64(value);
            } else if (key == "replicates") {
                c.replicates = static_cast<std::size_t>(parse_u64(value));
            } else if (key == "stride") {
                c.metrics_stride = parse_u64(value);
            } else if (key == "seed") {
                c.seed = parse_u64(value);
            } else if (key == "out") {
                if (value.empty()) throw UsageError("empty path");
                c.output_dir = value;
            } else if (key == "emit") {
                c.emit.clear();
                for (const auto& s : split_list(value)) c.emit.insert(parse_emit(s));
            } else if (key == "interleave") {
                c.interleave = Interleave::parse(value);
            } else if (key == "stop_error") {
                c.stop_error = parse_double(value);
            } else {
                throw UsageError("unknown key");
            }
        });
    }
    return c;
}

std::string to_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "gen = " << to_string(c.generator.kind) << '\n';
    out << "n = " << c.generator.n << '\n';
    out << "field = " << to_string(c.generator.field) << '\n';
    out << "theta = " << format_double(c.generator.theta) << '\n';
    out << "eta = " << format_double(c.generator.eta) << '\n';
    out << "sigma = ";
    for (std::size_t k = 0; k < c.generator.sigma.size(); ++k) {
        out << (k ? "," : "") << format_double(c.generator.sigma[k]);
    }
    out << '\n';
    if (c.kappa) out << "kappa = " << format_double(*c.kappa) << '\n';
    if (c.input) out << "input = " << c.input->string() << '\n';
    out << "sampler = " << to_string(c.sampler) << '\n';
    out << "steps = " << c.steps << '\n';
    out << "replicates = " << c.replicates << '\n';
    out << "stride = " << c.metrics_stride << '\n';
    if (c.seed) out << "seed = " << *c.seed << '\n';
    out << "out = " << c.output_dir.string() << '\n';
    out << "emit = ";
    bool first = true;
    for (Emit e : c.emit) {
        out << (first ? "" : ",") << to_string(e);
        first = false;
    }
    out << '\n';
    out << "interleave = " << c.interleave.str() << '\n';
    if (c.stop_error) out << "stop_error = " << format_double(*c.stop_error) << '\n';
    return out.str();
}

void validate(const ExperimentConfig& c) {
    if (c.steps < 1) throw UsageError("config field 'steps': must be at least 1");
    if (c.replicates < 1) throw UsageError("config field 'replicates': must be at least 1");
    if (c.metrics_stride < 1) throw UsageError("config field 'stride': must be at least 1");
    if (c.generator.n < 2) throw UsageError("config field 'n': must be at least 2");
    if (c.kappa && !(*c.kappa >= 1.0)) throw UsageError("config field 'kappa': must be at least 1");
    if (c.stop_error && !(*c.stop_error > 0.0)) {
        throw UsageError("config field 'stop_error': must be positive");
    }
}

GeneratorSpec resolved_generator(const ExperimentConfig& c) {
    GeneratorSpec spec = c.generator;
    if (spec.kind == GeneratorKind::prescribed_spectrum && spec.sigma.empty() && c.kappa) {
        spec.sigma = geometric_spectrum(spec.n, *c.kappa);
    }
    if (c.seed) spec.seed = derive_seed(*c.seed, Stream::generator, 0);
    return spec;
}

}  // namespace pairorth::cli
