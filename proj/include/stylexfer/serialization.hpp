#pragma once

#include "stylexfer/evaluate.hpp"
#include "stylexfer/harmonics.hpp"
#include "stylexfer/matching.hpp"
#include "stylexfer/patch.hpp"
#include "stylexfer/pdm.hpp"
#include "stylexfer/spheremap.hpp"
#include "stylexfer/style_transfer.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace stylexfer {

using Json = nlohmann::json;

// PDF: {"property", "order", "bands": [[...], ...]}
Json to_json(const PDF& pdf);
PDF pdf_from_json(const Json& j);

/// Little-endian binary: magic "SXPDF1", property id (int32), order (int32),
/// then (order+1)^2 float64 coefficients in l^2+l+m order.
std::vector<unsigned char> pdf_to_binary(const PDF& pdf);
PDF pdf_from_binary(const std::vector<unsigned char>& bytes);

// PDM: {"from", "to", "order", "bands": [{"rows", "cols", "data"}], "excluded", ...}
Json to_json(const PDM& pdm);
PDM pdm_from_json(const Json& j);

Json to_json(const MatchWeights& w);
MatchWeights weights_from_json(const Json& j);

Json to_json(const MatchResult& r);
MatchResult match_result_from_json(const Json& j);

/// Patch manifest with per-face labels; loading rebuilds boundaries against
/// the given mesh.
Json to_json(const PatchSet& set);
PatchSet patch_set_from_json(const Json& j, const Mesh& mesh);

Json to_json(const std::vector<PatchPdfs>& pdfs);
std::vector<PatchPdfs> patch_pdfs_from_json(const Json& j);

Json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const Json& j);

Json to_json(const LandmarkSet& l);
LandmarkSet landmarks_from_json(const Json& j);

/// {"iters": [...], "energy": [...]}
Json energy_trace_json(const SphericalMesh& sm);

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline. Output is byte-deterministic.
void write_json(const std::filesystem::path& path, const Json& j);

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);
std::vector<unsigned char> read_bytes(const std::filesystem::path& path);

}  // namespace stylexfer
