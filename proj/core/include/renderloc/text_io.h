#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace renderloc {

std::vector<std::string_view> SplitWhitespace(std::string_view line);

// Strict full-token parse; throws Error(kParseError) at `line`.
double ParseDouble(std::string_view token, std::size_t line);
long long ParseInt(std::string_view token, std::size_t line);

// 17 significant digits, so every value reads back bit-exact.
std::string FormatDouble(double value);

std::string ReadFile(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place. Creates
// missing parent directories.
void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& contents);

}  // namespace renderloc
