#pragma once

#include "stylexfer/serialization.hpp"
#include "stylexfer/style_transfer.hpp"
#include "stylexfer/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace stylexfer {

inline constexpr const char* kVersion = "1.0.0";

struct SyntheticRun {
    SyntheticSpec spec;
    std::uint64_t seed = 7;
};

/// Everything run-all needs. Landmarks are a file path here; the loaded set
/// lives in TransferOptions only while a run is in progress.
struct PipelineConfig {
    std::filesystem::path source;
    std::filesystem::path target;
    std::filesystem::path ground_truth;  // optional, enables eval
    std::filesystem::path landmarks;     // optional
    std::filesystem::path out_dir = "out";
    std::optional<SyntheticRun> synthetic;  // when set, gen replaces the three mesh paths
    std::string preset;                     // weight preset name, empty for explicit weights
    TransferOptions transfer;
    bool cache = true;

    /// Throws ConfigError.
    void validate() const;
};

Json to_json(const SyntheticSpec& spec);
/// Starts from defaults; unknown keys throw ConfigError.
SyntheticSpec synthetic_spec_from_json(const Json& j);

Json to_json(const PipelineConfig& config);

/// Unknown keys and bad values throw ConfigError. Relative paths are resolved
/// against base_dir.
PipelineConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});

/// Reads and parses a config file; paths resolve against its directory.
PipelineConfig load_config(const std::filesystem::path& path);

/// SHA-256 of the canonical JSON echo, without out_dir and cache.
std::string config_hash(const PipelineConfig& config);

Json to_json(const AssignParams& p);
Json to_json(const PrefilterOptions& p);
Json to_json(const SegmentOptions& p);
Json to_json(const ConformalOptions& p);
Json to_json(const FitOptions& p);

}  // namespace stylexfer
