#pragma once

#include "oracles.hpp"
#include "stylexfer/mesh.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing_util {

inline oracle::V3 v3(const stylexfer::Vec3& v) { return {v.x(), v.y(), v.z()}; }
inline stylexfer::Vec3 vec(const oracle::V3& v) { return {v[0], v[1], v[2]}; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("stylexfer_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing_util
