#pragma once

#include "stylexfer/error.hpp"

#include <filesystem>
#include <system_error>

namespace stylexfer {

/// create_directories that reports failure as IoError.
inline void make_dirs(const std::filesystem::path& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

inline void make_parent_dirs(const std::filesystem::path& file) { make_dirs(file.parent_path()); }

}  // namespace stylexfer
