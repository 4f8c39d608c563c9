#pragma once

#include "stylexfer/harmonics.hpp"
#include "stylexfer/mesh.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stylexfer {

struct PrefilterOptions {
    double sigma_s = 2.0;   // bilateral spatial sigma, in mean edge lengths
    double sigma_r = 0.1;   // bilateral range sigma, in value units
    int diffusion_iters = 5;
    double white_thresh = 0.98;
};

/// Bilateral filter over one-rings, then gradient-limited diffusion, then
/// values above white_thresh clamped to 1.
std::vector<double> prefilter(const Mesh& mesh, const HalfEdgeMesh& hem, std::span<const double> values,
                              const PrefilterOptions& options = {});

struct SegmentOptions {
    /// Felzenszwalb scale; when unset, value range times face count / 200.
    std::optional<double> k;
    int min_size = 20;  // faces
};

struct Patch {
    int id = -1;  // 0 is the background
    std::vector<int> face_ids;
    std::vector<int> vertex_ids;  // incident vertices plus the extension ring
    std::vector<std::vector<int>> boundary_loops;
    double area = 0.0;
    bool is_background = false;
};

struct PatchSet {
    std::vector<Patch> patches;  // patches[i].id == i, background first
    std::vector<int> face_labels;
    std::vector<int> vertex_labels;
    double k = 0.0;
    double otsu_threshold = 0.0;
    bool degenerate = false;  // fewer than two components
    std::vector<std::string> warnings;

    int foreground_count() const { return static_cast<int>(patches.size()) - 1; }
    const Patch& background() const { return patches.front(); }
    const Patch& at(int id) const;
};

/// Otsu threshold of values in [min, max] using `bins` histogram bins.
/// Weights default to 1.
double otsu_threshold(std::span<const double> values, std::span<const double> weights = {}, int bins = 256);

/// Graph segmentation on face adjacency (weights |value_a - value_b| of
/// vertex-averaged face values, threshold k / |C|), small-component merge, and
/// background selection: the largest-area component whose mean is below the
/// Otsu threshold. Foreground ids 1..K follow the smallest face index of each
/// component. Boundaries are extracted and extended for every patch.
PatchSet segment(const Mesh& mesh, const HalfEdgeMesh& hem, std::span<const double> filtered,
                 const SegmentOptions& options = {});

/// Rebuilds a PatchSet from per-face labels (0 background, 1..K foreground).
PatchSet patches_from_face_labels(const Mesh& mesh, const HalfEdgeMesh& hem, std::vector<int> face_labels);

/// Per-vertex label: the patch owning most incident faces, ties to the
/// smaller id. Isolated vertices get -1.
std::vector<int> vertex_labels(const Mesh& mesh, std::span<const int> face_labels);

/// Ordered closed loops of the patch boundary, oriented with the mesh. A
/// vertex where the patch touches itself appears once per visit.
std::vector<std::vector<int>> extract_boundary(std::span<const int> face_ids, const HalfEdgeMesh& hem);

/// Adds one-ring neighbours of boundary vertices lying outside the patch to
/// patch.vertex_ids. face_ids are untouched.
Patch extend_boundary(Patch patch, const HalfEdgeMesh& hem);

/// Properties fitted on source patches and target patches.
std::vector<Property> source_properties();
std::vector<Property> target_properties();

/// Fits one PDF per property with the patch vertex set as mask. Values are
/// taken from the channel named after the property.
std::map<Property, FitResult> build_patch_pdfs(const Patch& patch, const Mesh& mesh, const SphericalFitter& fitter,
                                               std::span<const Property> properties);

/// Vertex mask of a patch.
std::vector<char> patch_mask(const Patch& patch, int num_vertices);

}  // namespace stylexfer
