#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace stylexfer {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's contents. Throws IoError when unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace stylexfer
