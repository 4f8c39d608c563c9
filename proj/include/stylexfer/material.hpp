#pragma once

#include "stylexfer/mesh.hpp"

#include <span>

namespace stylexfer {

/// Parameters of the fluorescence emission model.
struct FluorescenceParams {
    double k = 1.0;        // system proportionality constant
    double I_o = 1.0;      // incident intensity
    double phi = 1.0;      // quantum yield, in [0, 1]
    double epsilon = 1.0;  // molar absorptivity
    double b = 1.0;        // path length

    /// Throws InvalidArgument on negative fields or phi > 1.
    void validate() const;
};

/// Emitted intensity k * I_o * phi * epsilon * b * c.
double fluorescent_intensity(const FluorescenceParams& p, double c);

/// Per-vertex material measures.
struct MaterialSample {
    double composition = 0.0;    // hue of the bispectral color (circular)
    double concentration = 0.0;  // luminance of the bispectral color
    double detail = 0.0;         // HSV value of the bispectral color
};

/// Hexcone HSV with every component in [0,1]. Gray input gives h = 0.
Vec3 rgb_to_hsv(const Vec3& rgb);
Vec3 hsv_to_rgb(const Vec3& hsv);

/// BT.601 luma 0.299 r + 0.587 g + 0.114 b.
double rgb_to_yuv_luminance(const Vec3& rgb);

MaterialSample measure(const Vec3& bispectral_rgb);

/// Adds "composition", "concentration" and "value" channels computed from
/// "bispectral_rgb". Throws InvalidArgument when the channel is missing.
void extract_measurements(Mesh& mesh);

/// Reduces x into [0, 1).
double wrap_unit(double x);

/// min(|a - b|, 1 - |a - b|) on wrapped inputs.
double hue_distance(double a, double b);

/// Signed shortest step from a to b on the unit circle, in [-0.5, 0.5).
double hue_delta(double a, double b);

/// Weighted circular mean of hues in [0, 1). Returns 0 when the resultant
/// vanishes or the input is empty.
double circular_mean(std::span<const double> hues, std::span<const double> weights = {});

}  // namespace stylexfer
