#pragma once

#include <string>

namespace d2d {

// Writes content to path atomically (temp file in the same directory, then
// rename). Throws std::runtime_error on I/O failure.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace d2d
