#pragma once

#include "stylexfer/mesh.hpp"

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

namespace stylexfer {

/// A mesh together with its image on the unit sphere.
struct SphericalMesh {
    Mesh base;                        // original geometry and channels
    std::vector<Vec3> sphere;         // unit positions, same indexing as base
    std::vector<double> energy_trace; // harmonic energy per accepted iterate
    int iterations = 0;
    bool converged = false;
};

struct ConformalOptions {
    int max_iters = 5000;
    double energy_tol = 1e-6;  // relative
    double step_size = 0.5;
};

/// Maps a closed genus-zero mesh conformally onto the unit sphere by
/// tangential Laplacian descent on the cotangent harmonic energy, with
/// reprojection and Moebius centering after every step. Steps that raise the
/// energy are halved, so the recorded trace never increases.
/// Throws TopologyError for non genus-zero input and NumericalError for
/// zero-area triangles.
SphericalMesh conformal_map_to_sphere(const Mesh& mesh, const ConformalOptions& options = {});

/// sum over edges of k_ij |f_i - f_j|^2 with cotangent constants taken from
/// the source positions.
double harmonic_energy(std::span<const Vec3> source, std::span<const Vec3> mapped, const HalfEdgeMesh& hem);

/// Same energy with precomputed per-edge constants (hem.edges() order).
double harmonic_energy(std::span<const double> weights, std::span<const Vec3> mapped, const HalfEdgeMesh& hem);

/// Mass-weighted mean of positions.
Vec3 weighted_centroid(std::span<const Vec3> positions, std::span<const double> masses);

/// Hyperbolic translation of the unit sphere that sends a (|a| < 1) to the
/// origin: x -> (1 - |a|^2)(x - a) / |x - a|^2 - a.
Vec3 mobius_translate(const Vec3& x, const Vec3& a);

/// Applies Moebius translations until the mass-weighted centroid of the unit
/// positions has norm below tol. Returns the final centroid norm.
double mobius_normalize(std::vector<Vec3>& sphere, std::span<const double> masses, double tol = 1e-6,
                        int max_iters = 200);

/// Corresponding points: source and target vertex ids, or explicit direction
/// pairs on the sphere (source, target).
struct LandmarkSet {
    std::vector<std::pair<int, int>> vertex_pairs;
    std::vector<std::pair<Vec3, Vec3>> direction_pairs;

    bool empty() const { return vertex_pairs.empty() && direction_pairs.empty(); }
};

/// Least-squares proper rotation R minimizing sum |R from_i - to_i|^2.
/// Throws InvalidArgument for fewer than 3 pairs or directions spanning less
/// than a plane.
Eigen::Matrix3d procrustes_rotation(std::span<const Vec3> from, std::span<const Vec3> to);

/// Rotation taking target landmark directions onto source ones. The rotation
/// is applied to tar.sphere in place and returned.
Eigen::Matrix3d align_spheres(const SphericalMesh& src, SphericalMesh& tar, const LandmarkSet& landmarks);

/// Disk parameterization of a topological disk: boundary on the unit circle
/// by arc length, interior harmonic with cotangent weights.
struct DiskMap {
    std::vector<Eigen::Vector2d> uv;
    std::vector<int> boundary;  // ordered boundary loop
};
DiskMap map_to_disk(const Mesh& disk);

/// Harmonic energy of the disk parameterization divided by the edge count.
/// Throws TopologyError unless the mesh is a connected single-boundary disk.
double disk_shape_energy(const Mesh& disk);

/// The base mesh with its channels, positions restored.
Mesh inverse_map(const SphericalMesh& sm);

/// Base mesh with the "sphere" vector channel set from sm.sphere.
Mesh with_sphere_channel(const SphericalMesh& sm);

/// Rebuilds a SphericalMesh from a mesh carrying a "sphere" channel.
SphericalMesh from_sphere_channel(const Mesh& mesh);

/// Per-face max |interior angle on the sphere - interior angle on the base|,
/// in radians.
std::vector<double> angle_distortion(std::span<const Vec3> base, std::span<const Vec3> mapped,
                                     std::span<const Face> faces);

}  // namespace stylexfer
