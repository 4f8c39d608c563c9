#pragma once

#include "stylexfer/mesh.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace stylexfer {

enum class MeshFormat { kPly, kObj };
enum class PlyEncoding { kBinaryLittleEndian, kAscii };

struct LoadOptions {
    /// Reject meshes that are not closed genus-zero manifolds.
    bool require_genus_zero = true;
    /// OBJ only: attribute sidecar. Defaults to "<path>.json" when present.
    std::optional<std::filesystem::path> sidecar;
};

/// Reads a PLY or OBJ mesh (format inferred from the extension when absent).
///
/// PLY vertex properties map onto channels as follows: x/y/z are positions,
/// red/green/blue form "bispectral_rgb" (uchar scaled to [0,1]),
/// color_r/color_g/color_b form "color", sx/sy/sz form "sphere", any
/// <name>_x/_y/_z triple forms vector channel <name>, and every other property
/// becomes a scalar channel of the same name.
///
/// OBJ supplies geometry only; channels come from a JSON sidecar mapping a
/// channel name to an array indexed by vertex (numbers for scalars, 3-element
/// arrays for vectors).
///
/// Throws ParseError, IoError, TopologyError (with the offending edges) or
/// InvalidArgument (channel length mismatch).
Mesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format = std::nullopt,
               const LoadOptions& options = {});

struct SaveOptions {
    PlyEncoding encoding = PlyEncoding::kBinaryLittleEndian;
    /// Vector channel written as the display red/green/blue properties.
    std::string rgb_channel = channel::kBispectral;
    /// Extra header comment lines (no newlines).
    std::vector<std::string> comments;
};

/// Writes a PLY file. Floating channels are stored as float32, patch_id as
/// int32, and rgb-like channels as uchar. Output is byte-deterministic.
void save_mesh(const Mesh& mesh, const std::filesystem::path& path, const SaveOptions& options = {});

}  // namespace stylexfer
