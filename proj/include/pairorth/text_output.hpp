#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace pairorth {

/// Decimal with 17 significant digits; enough for an exact double round trip.
std::string format_double(double value);

double parse_double(std::string_view text);

/// Writes `contents` to a sibling temp file and renames it over `path`, so
/// readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace pairorth
