#include "stylexfer/assignment.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/material.hpp"
#include "stylexfer/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stylexfer {

void AssignParams::validate() const {
    if (!(mu_s > 0) || !(mu_h > 0)) throw ConfigError("mu_s and mu_h must be positive");
    if (!(blend_sigma > 0)) throw ConfigError("blend_sigma must be positive");
    if (!std::isfinite(f_s)) throw ConfigError("f_s must be finite");
}

double blend_hue(double a, double b, double t) { return wrap_unit(a + t * hue_delta(a, b)); }

double mean_sphere_edge_length(std::span<const Vec3> sphere, const HalfEdgeMesh& hem) {
    const auto& edges = hem.edges();
    if (edges.empty()) return 0.0;
    double sum = 0.0;
    for (int h : edges) {
        const double c = std::clamp(sphere[hem.origin(h)].dot(sphere[hem.dest(h)]), -1.0, 1.0);
        sum += std::acos(c);
    }
    return sum / static_cast<double>(edges.size());
}

namespace {

struct Appearance {
    double hue;
    double sat;
};

Appearance evaluate(const ReconstructedPatch& p, const Vec3& dir) {
    return {wrap_unit(eval_pdf(p.hue, dir) - p.hue_shift), eval_pdf(p.saturation, dir)};
}

}  // namespace

BlendOutput blend(std::span<const Vec3> sphere, const PatchSet& patches,
                  const std::vector<ReconstructedPatch>& reconstructed, double sigma) {
    const std::size_t n = sphere.size();
    if (patches.vertex_labels.size() != n) throw InvalidArgument("patch labels do not cover the sphere vertices");
    if (!(sigma > 0)) throw InvalidArgument("blend sigma must be positive");
    if (reconstructed.size() != patches.patches.size()) {
        throw InvalidArgument("need one reconstructed patch per patch (" + std::to_string(patches.patches.size()) +
                              "), got " + std::to_string(reconstructed.size()));
    }
    for (std::size_t i = 0; i < reconstructed.size(); ++i) {
        if (reconstructed[i].id != static_cast<int>(i)) throw InvalidArgument("reconstructed patches out of order");
    }

    // Boundary vertices of every foreground patch, tagged with the patch.
    std::vector<std::pair<int, int>> boundary;  // (vertex, patch)
    for (const Patch& p : patches.patches) {
        if (p.is_background) continue;
        std::vector<int> verts;
        for (const auto& loop : p.boundary_loops) verts.insert(verts.end(), loop.begin(), loop.end());
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        for (int v : verts) boundary.emplace_back(v, p.id);
    }

    BlendOutput out;
    out.hue.resize(n);
    out.saturation.resize(n);
    out.other_weight.assign(n, 0.0);
    const double reach = 3.0 * sigma;
    const double cos_reach = reach >= std::numbers::pi ? -1.0 : std::cos(reach);
    parallel_for(0, n, [&](std::size_t v) {
        const int own = patches.vertex_labels[v] < 0 ? 0 : patches.vertex_labels[v];
        Appearance self = evaluate(reconstructed[own], sphere[v]);

        double best_dot = -2.0;
        int best_vertex = -1, best_patch = -1;
        for (const auto& [b, p] : boundary) {
            const double d = sphere[v].dot(sphere[b]);
            if (d > best_dot) {
                best_dot = d;
                best_vertex = b;
                best_patch = p;
            }
        }
        if (best_vertex >= 0 && best_dot >= cos_reach) {
            const double d = std::acos(std::clamp(best_dot, -1.0, 1.0));
            const double w = 0.5 * std::exp(-d * d / (2.0 * sigma * sigma));
            const int other = own == best_patch ? 0 : best_patch;
            if (other != own) {
                const Appearance far = evaluate(reconstructed[other], sphere[best_vertex]);
                self.hue = blend_hue(self.hue, far.hue, w);
                self.sat = (1.0 - w) * self.sat + w * far.sat;
                out.other_weight[v] = w;
            }
        }
        out.hue[v] = self.hue;
        out.saturation[v] = self.sat;
    });
    return out;
}

Mesh blend_and_compose(const Mesh& target, std::span<const Vec3> sphere, const PatchSet& patches,
                       const std::vector<ReconstructedPatch>& reconstructed, double sigma) {
    if (!target.has_scalar(channel::kValue)) {
        throw InvalidArgument(std::string("target has no '") + channel::kValue + "' channel");
    }
    BlendOutput b = blend(sphere, patches, reconstructed, sigma);
    const auto& value = target.scalar(channel::kValue);
    std::vector<Vec3> color(b.hue.size());
    for (std::size_t v = 0; v < b.hue.size(); ++v) {
        b.hue[v] = wrap_unit(b.hue[v]);
        b.saturation[v] = std::clamp(b.saturation[v], 0.0, 1.0);
        color[v] = hsv_to_rgb({b.hue[v], b.saturation[v], value[v]});
    }
    Mesh out = target;
    out.set_scalar(channel::kHue, std::move(b.hue));
    out.set_scalar(channel::kSaturation, std::move(b.saturation));
    out.set_vector(channel::kColor, std::move(color));
    std::vector<double> labels(patches.vertex_labels.begin(), patches.vertex_labels.end());
    out.set_scalar(channel::kPatchId, std::move(labels));
    return out;
}

}  // namespace stylexfer
