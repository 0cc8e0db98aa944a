#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pairorth/matrix.hpp"

namespace pairorth {

// Text format:
//   pairorth-matrix v1 <n> <real|complex>
//   n rows of n whitespace-separated entries, row-major; complex entries as re:im.
// Floats carry 17 significant digits, so write -> read is bit-exact.

std::string write_matrix_text(const AnyMatrix& a);
AnyMatrix read_matrix_text(std::istream& in);
AnyMatrix read_matrix_text(const std::string& text);

AnyMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const AnyMatrix& a);

}  // namespace pairorth
