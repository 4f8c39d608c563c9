#pragma once

#include "stylexfer/harmonics.hpp"
#include "stylexfer/mesh.hpp"
#include "stylexfer/patch.hpp"

#include <span>
#include <vector>

namespace stylexfer {

struct AssignParams {
    double mu_s = 1.0;  // saturation scale
    double f_s = 0.0;   // frequency parameter
    double mu_h = 1.0;  // hue scale
    /// Gaussian blend radius in mean sphere edge lengths.
    double blend_sigma = 2.0;
    /// Use (n + 1) + f_s i without dividing by n + 1.
    bool raw_sigma = false;

    /// Throws ConfigError unless mu_s, mu_h, blend_sigma are positive.
    void validate() const;
};

/// Appearance PDFs reconstructed for one target patch. hue_shift was added to
/// hue-like values before fitting and is subtracted after evaluation.
struct ReconstructedPatch {
    int id = -1;
    PDF hue;
    PDF saturation;
    double hue_shift = 0.0;
};

/// Shorter-arc hue interpolation: a + t * delta(a, b), wrapped.
double blend_hue(double a, double b, double t);

/// Mean great-circle length of the mesh edges on the sphere.
double mean_sphere_edge_length(std::span<const Vec3> sphere, const HalfEdgeMesh& hem);

struct BlendOutput {
    std::vector<double> hue;
    std::vector<double> saturation;
    /// Weight of the neighbouring side's value per vertex (0 away from
    /// boundaries, 0.5 on them); the own side has 1 minus this.
    std::vector<double> other_weight;
};

/// Evaluates each vertex's patch PDFs at its sphere direction and blends
/// across foreground patch boundaries with weight 0.5 exp(-d^2 / 2 sigma^2)
/// for the other side, where d is the arc distance to the nearest boundary
/// vertex of the closest foreground patch (applied within 3 sigma). The
/// other side is evaluated at that boundary vertex so each PDF is only read
/// inside its own mask. sigma is an arc length.
BlendOutput blend(std::span<const Vec3> sphere, const PatchSet& patches,
                  const std::vector<ReconstructedPatch>& reconstructed, double sigma);

/// Blends, clamps saturation to [0,1], wraps hue to [0,1), and writes "hue",
/// "saturation" and "color" = hsv_to_rgb(h, s, value) onto a copy of target.
/// Throws InvalidArgument when target has no "value" channel.
Mesh blend_and_compose(const Mesh& target, std::span<const Vec3> sphere, const PatchSet& patches,
                       const std::vector<ReconstructedPatch>& reconstructed, double sigma);

}  // namespace stylexfer
