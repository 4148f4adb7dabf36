#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace hom {

// Writes to `<path>.tmp` then renames over `path`.
void write_file_atomic(std::filesystem::path const& path, std::string_view content);

std::string read_file(std::filesystem::path const& path);

// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);

}  // namespace hom
