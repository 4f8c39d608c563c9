#include "stylexfer/material.hpp"

#include "stylexfer/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stylexfer {

void FluorescenceParams::validate() const {
    if (k < 0 || I_o < 0 || phi < 0 || epsilon < 0 || b < 0) {
        throw InvalidArgument("fluorescence parameters must be non-negative");
    }
    if (phi > 1) throw InvalidArgument("quantum yield must not exceed 1");
}

double fluorescent_intensity(const FluorescenceParams& p, double c) { return p.k * p.I_o * p.phi * p.epsilon * p.b * c; }

Vec3 rgb_to_hsv(const Vec3& rgb) {
    const double r = rgb.x(), g = rgb.y(), b = rgb.z();
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    double h = 0.0;
    if (delta > 0) {
        if (mx == r) {
            h = (g - b) / delta;
            if (h < 0) h += 6.0;
        } else if (mx == g) {
            h = 2.0 + (b - r) / delta;
        } else {
            h = 4.0 + (r - g) / delta;
        }
        h /= 6.0;
        if (h >= 1.0) h -= 1.0;
    }
    const double s = mx > 0 ? delta / mx : 0.0;
    return {h, s, mx};
}

Vec3 hsv_to_rgb(const Vec3& hsv) {
    const double h = wrap_unit(hsv.x()) * 6.0;
    const double s = hsv.y(), v = hsv.z();
    const int sector = std::min(static_cast<int>(std::floor(h)), 5);
    const double f = h - sector;
    const double p = v * (1 - s);
    const double q = v * (1 - s * f);
    const double t = v * (1 - s * (1 - f));
    switch (sector) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

double rgb_to_yuv_luminance(const Vec3& rgb) { return 0.299 * rgb.x() + 0.587 * rgb.y() + 0.114 * rgb.z(); }

MaterialSample measure(const Vec3& bispectral_rgb) {
    const Vec3 hsv = rgb_to_hsv(bispectral_rgb);
    return {hsv.x(), rgb_to_yuv_luminance(bispectral_rgb), hsv.z()};
}

void extract_measurements(Mesh& mesh) {
    if (!mesh.has_vector(channel::kBispectral)) {
        throw InvalidArgument(std::string("mesh has no '") + channel::kBispectral + "' channel");
    }
    const auto& rgb = mesh.vector(channel::kBispectral);
    std::vector<double> m(rgb.size()), c(rgb.size()), v(rgb.size());
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        const MaterialSample s = measure(rgb[i]);
        m[i] = s.composition;
        c[i] = s.concentration;
        v[i] = s.detail;
    }
    mesh.set_scalar(channel::kComposition, std::move(m));
    mesh.set_scalar(channel::kConcentration, std::move(c));
    mesh.set_scalar(channel::kValue, std::move(v));
}

double wrap_unit(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    return r;
}

double hue_distance(double a, double b) {
    const double d = std::abs(wrap_unit(a) - wrap_unit(b));
    return std::min(d, 1.0 - d);
}

double hue_delta(double a, double b) {
    double d = wrap_unit(b) - wrap_unit(a);
    if (d >= 0.5) d -= 1.0;
    if (d < -0.5) d += 1.0;
    return d;
}

double circular_mean(std::span<const double> hues, std::span<const double> weights) {
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < hues.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double a = 2.0 * std::numbers::pi * hues[i];
        sx += w * std::cos(a);
        sy += w * std::sin(a);
    }
    if (std::hypot(sx, sy) < 1e-12) return 0.0;
    return wrap_unit(std::atan2(sy, sx) / (2.0 * std::numbers::pi));
}

}  // namespace stylexfer
