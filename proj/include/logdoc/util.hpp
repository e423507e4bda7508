#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace logdoc {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Stable 64-bit FNV-1a, used wherever a hash must survive persistence.
std::uint64_t fnv1a64(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split(std::string_view s, char sep);

std::string read_text_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory followed by a rename, so a
// failed run never leaves a half-written output behind.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace logdoc
