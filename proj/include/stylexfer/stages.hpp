#pragma once

#include "stylexfer/config.hpp"
#include "stylexfer/evaluate.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stylexfer {

namespace fs = std::filesystem;

struct StageOutcome {
    std::string stage;
    bool cache_hit = false;
    std::string key;
};

/// SHA-256 over the stage name, the canonical params JSON and the contents of
/// every input file.
std::string stage_key(const std::string& stage, const Json& params, const std::vector<fs::path>& inputs);

/// Runs `fn` unless caching is on, every output exists, and the stamp next to
/// the first output records the same key and the current output hashes. A
/// fresh stamp is written after `fn` returns.
StageOutcome run_cached(const std::string& stage, const Json& params, const std::vector<fs::path>& inputs,
                        const std::vector<fs::path>& outputs, bool use_cache, const std::function<void()>& fn);

/// Stamp path for an output file: "<output>.stamp".
fs::path stamp_path(const fs::path& output);

/// Reproducibility header attached to every artifact: version plus whatever
/// the caller adds (config hash, seed, stage parameters).
struct ArtifactMeta {
    Json fields = Json::object();

    Json with(const Json& artifact) const;           // artifact plus "meta"
    std::vector<std::string> ply_comments() const;  // scalar fields only
};

ArtifactMeta make_meta(const std::string& stage, const Json& params);

struct GenPaths {
    fs::path source, target, ground_truth, landmarks;
};
GenPaths gen_paths(const fs::path& dir);

StageOutcome gen_file(const SyntheticRun& run, const fs::path& dir, const ArtifactMeta& meta, bool cache);

/// Conformal map; writes the mesh with a "sphere" channel and the energy
/// trace. With align_to and landmarks, the result is rotated onto align_to.
StageOutcome map_file(const fs::path& in, const fs::path& out, const fs::path& trace, const ConformalOptions& options,
                      const std::optional<fs::path>& align_to, const std::optional<fs::path>& landmarks,
                      const ArtifactMeta& meta, bool cache);

StageOutcome extract_file(const fs::path& in, const fs::path& out, bool appearance, const ArtifactMeta& meta,
                          bool cache);

StageOutcome segment_file(const fs::path& in, const fs::path& out, const fs::path& manifest,
                          const PrefilterOptions& prefilter, const SegmentOptions& segment, const ArtifactMeta& meta,
                          bool cache);

/// `role` is "source" (concentration, composition, curvature, hue,
/// saturation) or "target" (no appearance properties).
StageOutcome fit_file(const fs::path& mesh, const fs::path& manifest, const fs::path& out, const std::string& role,
                      int order, const FitOptions& options, const ArtifactMeta& meta, bool cache);

struct SideFiles {
    fs::path mesh, manifest, pdfs;
};

StageOutcome match_file(const SideFiles& src, const SideFiles& tar, const fs::path& out, const MatchWeights& weights,
                        bool normalize, const ArtifactMeta& meta, bool cache);

/// Writes the object-space result mesh and the per-patch maps.
StageOutcome transfer_file(const SideFiles& src, const SideFiles& tar, const fs::path& matches, const fs::path& out,
                           const fs::path& maps, const TransferOptions& options, const ArtifactMeta& meta,
                           bool cache);

StageOutcome eval_file(const fs::path& result, const fs::path& ground_truth, const fs::path& out,
                       const ArtifactMeta& meta, bool cache);

struct RenderInputs {
    std::optional<fs::path> mesh;          // per-channel false-color PLYs
    std::optional<fs::path> energy_trace;  // energy plot
    std::optional<fs::path> matches;       // cost heatmap
    std::optional<fs::path> result;        // with ground_truth: error histograms
    std::optional<fs::path> ground_truth;
};

/// Returns the files written.
std::vector<fs::path> render_files(const RenderInputs& in, const fs::path& out_dir);

struct RunSummary {
    std::vector<StageOutcome> stages;
    std::optional<EvalReport> report;
    fs::path result;
    fs::path report_path;
};

/// Chains every stage inside config.out_dir. Progress lines go to log.
RunSummary run_all(const PipelineConfig& config, std::ostream& log);

}  // namespace stylexfer
