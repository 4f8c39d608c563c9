#pragma once

#include "stylexfer/mesh.hpp"
#include "stylexfer/spheremap.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace stylexfer {

/// Seeded generator with platform-independent uniform and normal draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();   // standard normal (Box-Muller)
    Vec3 unit_vector();
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// One elliptical spot in the tangent plane at `center`.
struct SpotSpec {
    Vec3 center = Vec3::UnitZ();
    double radius = 0.3;       // geodesic radius (radians) of the equal-area circle
    double elongation = 1.0;   // axis ratio, >= 1
    double orientation = 0.0;  // major-axis angle in the tangent plane
    double composition = 0.5;  // hue of the bispectral color
    double concentration = 0.65;
    double relation_scale = 1.0;  // saturation = scale * concentration + offset
};

struct SyntheticSpec {
    std::string shape = "egg";  // sphere | egg | ellipsoid
    double a = 1.0;             // equatorial radius
    double b = 1.3;             // polar radius
    double c = 2.0;             // ellipsoid third axis
    double taper = 0.25;        // egg asymmetry
    int level = 5;

    int spots = 5;
    double radius_min = 0.25;
    double radius_max = 0.4;
    double contrast = 0.55;                // spot concentration minus background
    double background_concentration = 0.1;
    double background_composition = 0.08;
    double background_relation = 0.9;
    double relation_min = 0.7;
    double relation_max = 1.3;
    double relation_offset = 0.0;  // b in s = a c + b
    double hue_offset = 0.0;       // h = m + hue_offset
    double ramp_edges = 1.0;       // width of the spot edge, in edge lengths
    double separation_edges = 3.0;
    double bispectral_saturation = 0.3;
    double noise = 0.0;  // concentration noise sigma

    double target_concentration_scale = 0.8;
    double rotation_deg = 0.0;
    Vec3 rotation_axis = Vec3(0.3, 1.0, 0.2);
    int landmarks = 4;

    /// K = 0 only: concentration 0.5 + 0.3 Y_2^0 instead of a constant.
    bool band_limited = false;
    /// Use these spots instead of random placement.
    std::vector<SpotSpec> explicit_spots;

    /// Throws ConfigError on invalid fields.
    void validate() const;
};

struct SyntheticData {
    Mesh source;        // bispectral_rgb + hue + saturation + color
    Mesh target;        // bispectral_rgb
    Mesh ground_truth;  // target geometry with withheld hue + saturation
    LandmarkSet landmarks;
    std::vector<SpotSpec> spots;
};

/// Base geometry named by the spec.
Mesh synthetic_shape(const SyntheticSpec& spec);

/// Spot membership weight in [0,1] of a unit direction (1 inside, cosine ramp
/// of width `ramp` radians across the rim).
double spot_weight(const SpotSpec& spot, const Vec3& dir, double ramp);

/// Random non-overlapping spots; throws InvalidArgument when placement fails
/// after bounded retries.
std::vector<SpotSpec> place_spots(const SyntheticSpec& spec, double edge_angle, Rng& rng);

/// Bispectral color with hue m whose BT.601 luminance is c, quantized to 8
/// bits per channel.
Vec3 encode_bispectral(double m, double c, double saturation);

/// Deterministic for a fixed spec and seed.
SyntheticData gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace stylexfer
