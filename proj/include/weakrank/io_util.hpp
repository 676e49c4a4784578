#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace weakrank {

std::string read_file(const std::filesystem::path& path);

// Splits on '\n'; a trailing newline does not produce an empty last line.
std::vector<std::string> split_lines(const std::string& text);

// Writes to a temp file in the same directory and renames into place, so
// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace weakrank
