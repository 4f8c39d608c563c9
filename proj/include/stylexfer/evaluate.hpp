#pragma once

#include "stylexfer/mesh.hpp"

#include <vector>

namespace stylexfer {

struct PatchError {
    int id = 0;
    int vertices = 0;
    double mean_abs_err_hue = 0.0;
    double mean_abs_err_sat = 0.0;
};

struct EvalReport {
    int vertices = 0;
    double mean_abs_err_hue = 0.0;  // circular
    double mean_abs_err_sat = 0.0;
    double accuracy_hue = 1.0;
    double accuracy_sat = 1.0;
    std::vector<PatchError> per_patch;  // by the reconstructed "patch_id" channel when present
};

/// Per-vertex mean absolute hue (circular) and saturation errors. Throws
/// InvalidArgument naming both vertex counts when they differ, or when a
/// hue/saturation channel is missing.
EvalReport evaluate(const Mesh& reconstructed, const Mesh& ground_truth);

}  // namespace stylexfer
