#pragma once

#include <filesystem>
#include <string>

namespace lsr {

/// Reads a whole file; throws std::runtime_error if it cannot be opened.
std::string read_file(const std::filesystem::path& file);

/// Writes content to `file` atomically (write to a sibling temp file, then
/// rename over the target).
void write_file_atomic(const std::filesystem::path& file, const std::string& content);

}  // namespace lsr
