#include "pairorth/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include "pairorth/text_output.hpp"

namespace pairorth {
namespace {

constexpr std::string_view kMagic = "pairorth-matrix";
constexpr std::string_view kVersion = "v1";

std::string format_entry(double v) { return format_double(v); }

std::string format_entry(const std::complex<double>& v) {
    return format_double(v.real()) + ":" + format_double(v.imag());
}

template <FieldScalar T>
T parse_entry(const std::string& token);

template <>
double parse_entry<double>(const std::string& token) {
    return parse_double(token);
}

template <>
std::complex<double> parse_entry<std::complex<double>>(const std::string& token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
        throw UsageError("complex entry '" + token + "' is not of the form re:im");
    }
    const std::string_view view(token);
    return {parse_double(view.substr(0, colon)), parse_double(view.substr(colon + 1))};
}

template <FieldScalar T>
AnyMatrix read_body(std::istream& in, std::size_t n) {
    const auto m = static_cast<Eigen::Index>(n);
    DenseMatrix<T> entries(m, m);
    std::string token;
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            if (!(in >> token)) throw UsageError("matrix file truncated");
            entries(r, c) = parse_entry<T>(token);
        }
    }
    if (in >> token) throw UsageError("matrix file has trailing data");
    return ColumnMatrix<T>::build(std::move(entries), false);
}

}  // namespace

std::string write_matrix_text(const AnyMatrix& a) {
    std::ostringstream out;
    std::visit(
        [&out](const auto& m) {
            const std::size_t n = m.dim();
            out << kMagic << ' ' << kVersion << ' ' << n << ' ' << to_string(m.field()) << '\n';
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) {
                    if (c) out << ' ';
                    out << format_entry(m(r, c));
                }
                out << '\n';
            }
        },
        a);
    return out.str();
}

AnyMatrix read_matrix_text(std::istream& in) {
    std::string magic, version, field_text;
    long long n = 0;
    if (!(in >> magic >> version >> n >> field_text) || magic != kMagic) {
        throw UsageError("not a pairorth-matrix file");
    }
    if (version != kVersion) throw UsageError("unsupported matrix file version '" + version + "'");
    if (n < 2) throw UsageError("matrix dimension must be at least 2");
    const auto size = static_cast<std::size_t>(n);
    return parse_field(field_text) == Field::real ? read_body<double>(in, size)
                                                  : read_body<std::complex<double>>(in, size);
}

AnyMatrix read_matrix_text(const std::string& text) {
    std::istringstream in(text);
    return read_matrix_text(in);
}

AnyMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open matrix file '" + path.string() + "'");
    return read_matrix_text(in);
}

void save_matrix(const std::filesystem::path& path, const AnyMatrix& a) {
    write_file_atomic(path, write_matrix_text(a));
}

}  // namespace pairorth
