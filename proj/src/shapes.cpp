#include "stylexfer/shapes.hpp"

#include "stylexfer/error.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace stylexfer::shapes {

Mesh icosphere(int level, double radius) {
    if (level < 0) throw InvalidArgument("icosphere level must be non-negative");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    Mesh m;
    m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                  {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : m.vertices) v.normalize();
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
               {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int idx = m.num_vertices();
            m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Face> next;
        next.reserve(m.faces.size() * 4);
        for (const Face& f : m.faces) {
            const int a = mid(f[0], f[1]);
            const int b = mid(f[1], f[2]);
            const int c = mid(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        m.faces = std::move(next);
    }
    for (auto& v : m.vertices) v *= radius;
    return m;
}

Mesh radial_surface(int level, const std::function<Vec3(const Vec3&)>& surface) {
    Mesh m = icosphere(level);
    for (auto& v : m.vertices) v = surface(v);
    return m;
}

Mesh ellipsoid(int level, double a, double b, double c) {
    return radial_surface(level, [=](const Vec3& d) { return Vec3(a * d.x(), b * d.y(), c * d.z()); });
}

Mesh egg(int level, double a, double b, double taper) {
    return radial_surface(level, [=](const Vec3& d) {
        const double widen = 1.0 + taper * d.z();
        return Vec3(a * widen * d.x(), a * widen * d.y(), b * d.z());
    });
}

Mesh plane_grid(int n, double spacing) {
    Mesh m;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) m.vertices.emplace_back(i * spacing, j * spacing, 0.0);
    }
    auto idx = [n](int i, int j) { return j * n + i; };
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            m.faces.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
            m.faces.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
        }
    }
    return m;
}

Mesh cylinder(double radius, double height, int around, int rings) {
    Mesh m;
    for (int r = 0; r < rings; ++r) {
        const double z = rings > 1 ? height * r / (rings - 1) : 0.0;
        for (int k = 0; k < around; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / around;
            m.vertices.emplace_back(radius * std::cos(phi), radius * std::sin(phi), z);
        }
    }
    auto idx = [around](int k, int r) { return r * around + (k % around); };
    for (int r = 0; r + 1 < rings; ++r) {
        for (int k = 0; k < around; ++k) {
            m.faces.push_back({idx(k, r), idx(k + 1, r), idx(k + 1, r + 1)});
            m.faces.push_back({idx(k, r), idx(k + 1, r + 1), idx(k, r + 1)});
        }
    }
    return m;
}

Mesh unit_disk(int rings) {
    if (rings < 1) throw InvalidArgument("disk needs at least one ring");
    Mesh m;
    m.vertices.emplace_back(0.0, 0.0, 0.0);
    // Ring r has 6r vertices at radius r / rings.
    std::vector<int> start(rings + 1, 0);
    for (int r = 1; r <= rings; ++r) {
        start[r] = m.num_vertices();
        for (int k = 0; k < 6 * r; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / (6 * r);
            const double rad = static_cast<double>(r) / rings;
            m.vertices.emplace_back(rad * std::cos(phi), rad * std::sin(phi), 0.0);
        }
    }
    auto ring_vertex = [&](int r, int k) { return r == 0 ? 0 : start[r] + (k % (6 * r)); };
    for (int r = 0; r < rings; ++r) {
        // Walk the six sectors between ring r and r+1.
        for (int s = 0; s < 6; ++s) {
            for (int j = 0; j <= r; ++j) {
                const int outer_a = ring_vertex(r + 1, s * (r + 1) + j);
                const int outer_b = ring_vertex(r + 1, s * (r + 1) + j + 1);
                const int inner_a = ring_vertex(r, s * r + j);
                m.faces.push_back({inner_a, outer_a, outer_b});
                if (j < r) {
                    const int inner_b = ring_vertex(r, s * r + j + 1);
                    m.faces.push_back({inner_a, outer_b, inner_b});
                }
            }
        }
    }
    return m;
}

}  // namespace stylexfer::shapes
