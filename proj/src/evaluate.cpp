#include "stylexfer/evaluate.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/material.hpp"

#include <cmath>
#include <map>

namespace stylexfer {

EvalReport evaluate(const Mesh& reconstructed, const Mesh& ground_truth) {
    if (reconstructed.num_vertices() != ground_truth.num_vertices()) {
        throw InvalidArgument("vertex count mismatch: reconstructed has " +
                              std::to_string(reconstructed.num_vertices()) + ", ground truth has " +
                              std::to_string(ground_truth.num_vertices()));
    }
    for (const Mesh* m : {&reconstructed, &ground_truth}) {
        for (const char* name : {channel::kHue, channel::kSaturation}) {
            if (!m->has_scalar(name)) {
                throw InvalidArgument(std::string(m == &reconstructed ? "reconstructed" : "ground truth") +
                                      " mesh has no '" + name + "' channel");
            }
        }
    }
    const auto& h = reconstructed.scalar(channel::kHue);
    const auto& s = reconstructed.scalar(channel::kSaturation);
    const auto& hg = ground_truth.scalar(channel::kHue);
    const auto& sg = ground_truth.scalar(channel::kSaturation);
    const bool labelled = reconstructed.has_scalar(channel::kPatchId);

    EvalReport r;
    r.vertices = reconstructed.num_vertices();
    std::map<int, PatchError> patches;
    for (int v = 0; v < r.vertices; ++v) {
        const double eh = hue_distance(h[v], hg[v]);
        const double es = std::abs(s[v] - sg[v]);
        r.mean_abs_err_hue += eh;
        r.mean_abs_err_sat += es;
        if (labelled) {
            const int id = static_cast<int>(std::lround(reconstructed.scalar(channel::kPatchId)[v]));
            PatchError& p = patches[id];
            p.id = id;
            ++p.vertices;
            p.mean_abs_err_hue += eh;
            p.mean_abs_err_sat += es;
        }
    }
    if (r.vertices > 0) {
        r.mean_abs_err_hue /= r.vertices;
        r.mean_abs_err_sat /= r.vertices;
    }
    r.accuracy_hue = 1.0 - r.mean_abs_err_hue;
    r.accuracy_sat = 1.0 - r.mean_abs_err_sat;
    for (auto& [id, p] : patches) {
        p.mean_abs_err_hue /= p.vertices;
        p.mean_abs_err_sat /= p.vertices;
        r.per_patch.push_back(p);
    }
    return r;
}

}  // namespace stylexfer
