#pragma once

#include <filesystem>
#include <string>

namespace dronepaint::util {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

// Shortest decimal that round-trips the double exactly (>= 9 significant
// digits are always preserved).
std::string format_double(double value);

} // namespace dronepaint::util
