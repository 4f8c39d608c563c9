#pragma once

#include "stylexfer/harmonics.hpp"
#include "stylexfer/mesh.hpp"
#include "stylexfer/patch.hpp"

#include <map>
#include <string>
#include <vector>

namespace stylexfer {

/// Weights of the shape, area, curvature, composition and concentration costs.
struct MatchWeights {
    double alpha = 0.2;
    double beta = 0.2;
    double gamma = 0.2;
    double delta = 0.2;
    double lambda = 0.2;

    /// Scales the weights to sum 1. Throws ConfigError on negative or
    /// non-finite weights, or an all-zero set.
    MatchWeights normalized() const;

    /// "paper-similar", "paper-diffcolor" or "paper-teaser", normalized.
    static MatchWeights preset(const std::string& name);
    static std::vector<std::string> preset_names();
};

/// What the matcher needs to know about one patch.
struct PatchDescriptor {
    int id = -1;
    double area = 0.0;
    double shape_energy = 0.0;
    std::map<Property, PDF> pdfs;  // curvature, composition, concentration
};

/// Disk shape energy of a patch cut out of the base mesh.
double patch_shape_energy(const Mesh& base, const Patch& patch);

PatchDescriptor describe_patch(const Mesh& base, const Patch& patch, std::map<Property, PDF> pdfs);

struct CostTerms {
    double shape = 0.0;
    double area = 0.0;
    double curvature = 0.0;
    double composition = 0.0;
    double concentration = 0.0;

    double weighted(const MatchWeights& w) const {
        return w.alpha * shape + w.beta * area + w.gamma * curvature + w.delta * composition + w.lambda * concentration;
    }
};

double shape_cost(const PatchDescriptor& src, const PatchDescriptor& tar);
double area_cost(const PatchDescriptor& src, const PatchDescriptor& tar);
CostTerms raw_costs(const PatchDescriptor& src, const PatchDescriptor& tar);

struct MatchEntry {
    int tar_id = -1;
    int src_id = -1;
    CostTerms raw;
    CostTerms costs;  // after column normalization (equal to raw when off)
    double total = 0.0;
};

struct MatchResult {
    std::vector<MatchEntry> matches;  // background pair first, then by tar id
    MatchWeights weights;
    bool normalized = true;
    std::vector<int> src_ids;                // foreground source ids, cost matrix columns
    std::vector<int> tar_ids;                // foreground target ids, cost matrix rows
    std::vector<std::vector<double>> total;  // weighted cost per (tar, src)

    /// Source patch assigned to a target patch; throws when absent.
    int source_for(int tar_id) const;
};

/// Independent argmin per foreground target patch over foreground source
/// patches of the weighted cost; ties go to the lowest source id. When
/// `normalize` is set each cost column is min-max scaled over the candidate
/// matrix first. Background (id 0) pairs with background. Throws
/// InvalidArgument when either side has no foreground patch.
MatchResult match_patches(const std::vector<PatchDescriptor>& src, const std::vector<PatchDescriptor>& tar,
                          const MatchWeights& weights, bool normalize = true);

}  // namespace stylexfer
