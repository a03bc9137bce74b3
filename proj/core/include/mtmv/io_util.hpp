#pragma once

#include <filesystem>
#include <string>

#include "mtmv/types.hpp"

namespace mtmv::detail {

// Formats a double with enough significant digits (17) that parsing the text
// recovers the original bit pattern.
std::string format_double(double v);

// Comma-separated rows, one line per matrix row, full round-trip precision.
std::string matrix_csv(const Matrix& m);

// Writes content to path via a temporary file in the same directory followed
// by a rename, so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

} // namespace mtmv::detail
