#include "stylexfer/synthetic.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/harmonics.hpp"
#include "stylexfer/material.hpp"
#include "stylexfer/shapes.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stylexfer {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (spare_) {
        const double s = *spare_;
        spare_.reset();
        return s;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

Vec3 Rng::unit_vector() {
    Vec3 v;
    do {
        v = Vec3(normal(), normal(), normal());
    } while (v.norm() < 1e-9);
    return v.normalized();
}

void SyntheticSpec::validate() const {
    if (shape != "sphere" && shape != "egg" && shape != "ellipsoid") {
        throw ConfigError("unknown synthetic shape '" + shape + "'");
    }
    if (level < 0 || level > 7) throw ConfigError("subdivision level must be in [0, 7]");
    if (spots < 0) throw ConfigError("spot count must be non-negative");
    if (!(contrast > 0 && contrast <= 1)) throw ConfigError("contrast must be in (0, 1]");
    if (!(radius_min > 0 && radius_max >= radius_min)) throw ConfigError("invalid spot radius range");
    if (!(relation_min > 0 && relation_max >= relation_min)) throw ConfigError("relation scales must be positive");
    if (!(bispectral_saturation > 0 && bispectral_saturation < 1)) {
        throw ConfigError("bispectral saturation must be in (0, 1)");
    }
    const double brightest = 1.0 - 0.886 * bispectral_saturation;
    if (background_concentration + contrast + 0.05 > brightest) {
        throw ConfigError("spot concentration exceeds the encodable luminance " + std::to_string(brightest));
    }
    if (!(target_concentration_scale > 0)) throw ConfigError("target concentration scale must be positive");
    if (band_limited && spots != 0) throw ConfigError("band-limited fixtures have no spots");
    if (landmarks != 0 && landmarks < 3) throw ConfigError("landmark count must be 0 or at least 3");
}

Mesh synthetic_shape(const SyntheticSpec& spec) {
    if (spec.shape == "sphere") return shapes::icosphere(spec.level, spec.a);
    if (spec.shape == "egg") return shapes::egg(spec.level, spec.a, spec.b, spec.taper);
    return shapes::ellipsoid(spec.level, spec.a, spec.b, spec.c);
}

namespace {

void tangent_frame(const Vec3& c, double orientation, Vec3& e1, Vec3& e2) {
    Eigen::Index k;
    c.cwiseAbs().minCoeff(&k);
    Vec3 helper = Vec3::Unit(k);
    Vec3 a = c.cross(helper).normalized();
    Vec3 b = c.cross(a);
    e1 = std::cos(orientation) * a + std::sin(orientation) * b;
    e2 = c.cross(e1);
}

double mean_edge_angle(const std::vector<Vec3>& dirs, const std::vector<Face>& faces) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const Face& f : faces) {
        for (int k = 0; k < 3; ++k) {
            sum += std::acos(std::clamp(dirs[f[k]].dot(dirs[f[(k + 1) % 3]]), -1.0, 1.0));
            ++count;
        }
    }
    return count ? sum / count : 0.0;
}

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform() * i);
        std::swap(v[i - 1], v[std::min(j, i - 1)]);
    }
}

std::vector<double> spread(double lo, double hi, int k) {
    std::vector<double> out;
    for (int i = 0; i < k; ++i) out.push_back(k == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (k - 1));
    return out;
}

double outer_radius(const SpotSpec& s) { return s.radius * std::sqrt(s.elongation); }

struct Painted {
    Vec3 rgb;
    double hue;
    double saturation;
    double value;
};

}  // namespace

double spot_weight(const SpotSpec& spot, const Vec3& dir, double ramp) {
    const Vec3 c = spot.center.normalized();
    const double theta = std::acos(std::clamp(c.dot(dir), -1.0, 1.0));
    if (theta > outer_radius(spot) + ramp) return 0.0;
    double s;
    const Vec3 t = dir - c.dot(dir) * c;
    if (t.norm() < 1e-12) {
        s = -spot.radius / std::sqrt(spot.elongation);
    } else {
        Vec3 e1, e2;
        tangent_frame(c, spot.orientation, e1, e2);
        const Vec3 tn = t.normalized();
        const double ra = spot.radius * std::sqrt(spot.elongation);
        const double rb = spot.radius / std::sqrt(spot.elongation);
        const double u = theta * tn.dot(e1) / ra;
        const double v = theta * tn.dot(e2) / rb;
        const double rho = std::hypot(u, v);
        s = theta * (1.0 - 1.0 / rho);
    }
    if (ramp <= 0) return s <= 0 ? 1.0 : 0.0;
    if (s <= -0.5 * ramp) return 1.0;
    if (s >= 0.5 * ramp) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (s + 0.5 * ramp) / ramp));
}

std::vector<SpotSpec> place_spots(const SyntheticSpec& spec, double edge_angle, Rng& rng) {
    const int k = spec.spots;
    std::vector<double> radii = spread(spec.radius_min, spec.radius_max, k);
    std::vector<double> relations = spread(spec.relation_min, spec.relation_max, k);
    shuffle(radii, rng);
    shuffle(relations, rng);
    const double hue_start = rng.uniform();
    std::vector<double> hues;
    for (int i = 0; i < k; ++i) hues.push_back(wrap_unit(hue_start + static_cast<double>(i) / std::max(k, 1)));
    shuffle(hues, rng);

    const double ramp = spec.ramp_edges * edge_angle;
    const double gap = spec.separation_edges * edge_angle + ramp;
    std::vector<SpotSpec> spots;
    for (int i = 0; i < k; ++i) {
        SpotSpec s;
        s.radius = radii[i];
        s.composition = hues[i];
        s.concentration = spec.background_concentration + spec.contrast + 0.05 * rng.uniform();
        s.relation_scale = relations[i];
        bool placed = false;
        for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
            s.center = rng.unit_vector();
            placed = true;
            for (const SpotSpec& o : spots) {
                const double angle = std::acos(std::clamp(o.center.dot(s.center), -1.0, 1.0));
                if (angle < outer_radius(o) + outer_radius(s) + gap) {
                    placed = false;
                    break;
                }
            }
        }
        if (!placed) {
            throw InvalidArgument("could not place spot " + std::to_string(i + 1) + " of " + std::to_string(k) +
                                  " without overlap");
        }
        spots.push_back(s);
    }
    return spots;
}

Vec3 encode_bispectral(double m, double c, double saturation) {
    const double y_full = rgb_to_yuv_luminance(hsv_to_rgb({m, saturation, 1.0}));
    const double v = std::clamp(c / y_full, 0.0, 1.0);
    const Vec3 rgb = hsv_to_rgb({m, saturation, v});
    Vec3 q;
    for (int i = 0; i < 3; ++i) q[i] = std::round(std::clamp(rgb[i], 0.0, 1.0) * 255.0) / 255.0;
    return q;
}

SyntheticData gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const Mesh shape = synthetic_shape(spec);
    std::vector<Vec3> dirs(shape.vertices.size());
    for (std::size_t i = 0; i < dirs.size(); ++i) dirs[i] = shape.vertices[i].normalized();
    const double edge_angle = mean_edge_angle(dirs, shape.faces);
    const double ramp = spec.ramp_edges * edge_angle;

    SyntheticData data;
    data.spots = spec.explicit_spots.empty() ? place_spots(spec, edge_angle, rng) : spec.explicit_spots;

    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(spec.rotation_deg * std::numbers::pi / 180.0, spec.rotation_axis.normalized())
            .toRotationMatrix();
    std::vector<SpotSpec> target_spots = data.spots;
    for (auto& s : target_spots) s.center = rot * s.center;

    // Noise draws are taken once per vertex so source and target stay in step.
    std::vector<double> noise(dirs.size(), 0.0);
    if (spec.noise > 0) {
        for (auto& n : noise) n = spec.noise * rng.normal();
    }

    const double c_max = 1.0 - 0.886 * spec.bispectral_saturation;
    auto paint = [&](const std::vector<SpotSpec>& spots, const Vec3& dir, double noise_v, double c_scale) {
        double w = 0.0;
        const SpotSpec* spot = nullptr;
        for (const SpotSpec& s : spots) {
            const double ws = spot_weight(s, dir, ramp);
            if (ws > w) {
                w = ws;
                spot = &s;
            }
        }
        double c = spec.background_concentration;
        double m = spec.background_composition;
        double a = spec.background_relation;
        if (spec.band_limited) c = 0.5 + 0.3 * sh_basis(2, 0, dir);
        if (spot) {
            c += w * (spot->concentration - c);
            m = wrap_unit(m + w * hue_delta(m, spot->composition));
            a += w * (spot->relation_scale - a);
        }
        c = std::clamp(c_scale * (c + noise_v), 0.0, c_max);
        Painted p;
        p.rgb = encode_bispectral(m, c, spec.bispectral_saturation);
        const MaterialSample meas = measure(p.rgb);
        p.saturation = std::clamp(a * meas.concentration + spec.relation_offset, 0.0, 1.0);
        p.hue = wrap_unit(meas.composition + spec.hue_offset);
        p.value = meas.detail;
        return p;
    };

    const std::size_t n = dirs.size();
    std::vector<Vec3> src_rgb(n), tar_rgb(n), src_color(n);
    std::vector<double> src_h(n), src_s(n), tar_h(n), tar_s(n);
    for (std::size_t v = 0; v < n; ++v) {
        const Painted ps = paint(data.spots, dirs[v], noise[v], 1.0);
        const Painted pt = paint(target_spots, dirs[v], noise[v], spec.target_concentration_scale);
        src_rgb[v] = ps.rgb;
        src_h[v] = ps.hue;
        src_s[v] = ps.saturation;
        src_color[v] = hsv_to_rgb({ps.hue, ps.saturation, ps.value});
        tar_rgb[v] = pt.rgb;
        tar_h[v] = pt.hue;
        tar_s[v] = pt.saturation;
    }

    data.source = shape;
    data.source.set_vector(channel::kBispectral, src_rgb);
    data.source.set_scalar(channel::kHue, src_h);
    data.source.set_scalar(channel::kSaturation, src_s);
    data.source.set_vector(channel::kColor, src_color);

    data.target = shape;
    data.target.set_vector(channel::kBispectral, tar_rgb);

    data.ground_truth = data.target;
    data.ground_truth.set_scalar(channel::kHue, tar_h);
    data.ground_truth.set_scalar(channel::kSaturation, tar_s);

    for (int i = 0; i < spec.landmarks; ++i) {
        const int s = static_cast<int>(rng.uniform() * n);
        const Vec3 want = rot * dirs[s];
        int best = 0;
        for (std::size_t v = 1; v < n; ++v) {
            if (dirs[v].dot(want) > dirs[best].dot(want)) best = static_cast<int>(v);
        }
        data.landmarks.vertex_pairs.emplace_back(s, best);
    }
    return data;
}

}  // namespace stylexfer
