#pragma once

#include "stylexfer/assignment.hpp"
#include "stylexfer/harmonics.hpp"
#include "stylexfer/matching.hpp"
#include "stylexfer/patch.hpp"
#include "stylexfer/pdm.hpp"
#include "stylexfer/spheremap.hpp"

#include <Eigen/Core>

#include <map>
#include <optional>
#include <vector>

namespace stylexfer {

struct TransferOptions {
    int order = 16;
    MatchWeights weights;
    bool normalize_costs = true;
    AssignParams assign;
    PrefilterOptions prefilter;
    SegmentOptions segment;
    ConformalOptions conformal;
    FitOptions fit;
    LandmarkSet landmarks;  // empty: no alignment

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// Fitted PDFs of one patch.
struct PatchPdfs {
    int id = -1;
    std::map<Property, PDF> pdfs;
    std::map<Property, double> residual_rms;
};

/// Maps built for one target patch.
struct PatchMaps {
    int tar_id = -1;
    int src_id = -1;
    double hue_shift = 0.0;
    PDM tau_cs;  // concentration -> saturation on the source patch
    PDM tau_mh;  // composition -> hue on the source patch
    PDM q_c;     // source -> target concentration
    PDM q_m;     // source -> target composition
    PDM q_s;     // saturation transform
    PDM q_h;     // hue transform
};

struct TransferResult {
    Mesh result;  // target with hue, saturation, color, patch_id
    std::vector<ReconstructedPatch> patches;
    std::vector<PatchMaps> maps;
    double blend_sigma = 0.0;  // arc length used
};

/// Conformal map of one mesh.
SphericalMesh map_stage(const Mesh& mesh, const ConformalOptions& options);

/// Adds composition, concentration and value from bispectral_rgb and the
/// normal curvature. When `appearance` is set, hue and saturation are taken
/// from the "color" channel unless already present; missing appearance
/// channels then throw InvalidArgument.
void extract_stage(Mesh& mesh, bool appearance);

/// Prefilters concentration into "filtered", segments it and writes
/// "patch_id" per vertex.
PatchSet segment_stage(Mesh& mesh, const PrefilterOptions& prefilter, const SegmentOptions& segment);

/// Sphere-area-weighted fitter on the sphere positions of sm.
SphericalFitter make_fitter(const SphericalMesh& sm, int order, const FitOptions& options);

/// PDFs of every patch for the given properties.
std::vector<PatchPdfs> fit_stage(const SphericalMesh& sm, const PatchSet& patches, std::span<const Property> properties,
                                 int order, const FitOptions& options);

/// Builds descriptors and matches target patches to source patches.
MatchResult match_stage(const Mesh& src_base, const PatchSet& src_patches, const std::vector<PatchPdfs>& src_pdfs,
                        const Mesh& tar_base, const PatchSet& tar_patches, const std::vector<PatchPdfs>& tar_pdfs,
                        const MatchWeights& weights, bool normalize);

/// Learns material maps on the matched source patches, transfers them to the
/// target patches, and composes the final colors.
TransferResult transfer_stage(const SphericalMesh& src, const PatchSet& src_patches, const SphericalMesh& tar,
                              const PatchSet& tar_patches, const MatchResult& matches, const TransferOptions& options);

struct TransferArtifacts {
    SphericalMesh src;
    SphericalMesh tar;
    std::optional<Eigen::Matrix3d> alignment;
    PatchSet src_patches;
    PatchSet tar_patches;
    std::vector<PatchPdfs> src_pdfs;
    std::vector<PatchPdfs> tar_pdfs;
    MatchResult matches;
    TransferResult transfer;
    Mesh result;  // object-space mesh with reconstructed appearance
};

/// map, align, extract, segment, fit, match, assign, blend and inverse map.
/// Failures are rethrown as StageError tagged with the stage name.
TransferArtifacts style_transfer(const Mesh& src, const Mesh& tar, const TransferOptions& options);

}  // namespace stylexfer
