#pragma once

#include "stylexfer/mesh.hpp"

#include <functional>

namespace stylexfer::shapes {

/// Subdivided icosahedron projected to the sphere of the given radius.
/// Level L has 10*4^L + 2 vertices.
Mesh icosphere(int level, double radius = 1.0);

/// Icosphere with every vertex direction d replaced by surface(d).
Mesh radial_surface(int level, const std::function<Vec3(const Vec3&)>& surface);

/// Axis-aligned ellipsoid with semi-axes (a, b, c).
Mesh ellipsoid(int level, double a, double b, double c);

/// Egg: ellipsoid (a, a, b) whose equatorial radius grows by (1 + taper * z/b)
/// toward +z.
Mesh egg(int level, double a, double b, double taper);

/// Flat n x n grid of unit spacing in the z = 0 plane, triangulated.
Mesh plane_grid(int n, double spacing = 1.0);

/// Open cylinder of the given radius along z with `around` segments and
/// `rings` rows of vertices.
Mesh cylinder(double radius, double height, int around, int rings);

/// Triangulated flat unit disk with concentric rings.
Mesh unit_disk(int rings);

}  // namespace stylexfer::shapes
