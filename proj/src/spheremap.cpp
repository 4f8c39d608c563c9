#include "stylexfer/spheremap.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stylexfer {

namespace {

// Symmetric weighted adjacency in compressed rows.
struct WeightedGraph {
    std::vector<int> offsets;
    std::vector<int> neighbors;
    std::vector<double> weights;
};

WeightedGraph build_graph(const HalfEdgeMesh& hem, std::span<const double> k) {
    const int n = hem.num_vertices();
    WeightedGraph g;
    g.offsets.assign(n + 1, 0);
    const auto& edges = hem.edges();
    for (int h : edges) {
        ++g.offsets[hem.origin(h) + 1];
        ++g.offsets[hem.dest(h) + 1];
    }
    for (int v = 0; v < n; ++v) g.offsets[v + 1] += g.offsets[v];
    g.neighbors.resize(g.offsets[n]);
    g.weights.resize(g.offsets[n]);
    std::vector<int> fill(g.offsets.begin(), g.offsets.end() - 1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int a = hem.origin(edges[e]);
        const int b = hem.dest(edges[e]);
        g.neighbors[fill[a]] = b;
        g.weights[fill[a]++] = k[e];
        g.neighbors[fill[b]] = a;
        g.weights[fill[b]++] = k[e];
    }
    return g;
}

std::vector<Vec3> central_projection(std::span<const Vec3> positions, const Vec3& center) {
    std::vector<Vec3> out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const Vec3 d = positions[i] - center;
        const double len = d.norm();
        out[i] = len > 0 ? Vec3(d / len) : Vec3::UnitZ();
    }
    return out;
}

bool has_flipped_faces(std::span<const Vec3> sphere, std::span<const Face> faces) {
    for (const Face& f : faces) {
        const Vec3& a = sphere[f[0]];
        const Vec3& b = sphere[f[1]];
        const Vec3& c = sphere[f[2]];
        if ((b - a).cross(c - a).dot(a + b + c) <= 0) return true;
    }
    return false;
}

double interior_angle(const Vec3& at, const Vec3& p, const Vec3& q) {
    const Vec3 u = p - at;
    const Vec3 v = q - at;
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace

double harmonic_energy(std::span<const double> weights, std::span<const Vec3> mapped, const HalfEdgeMesh& hem) {
    const auto& edges = hem.edges();
    double e = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        e += weights[i] * (mapped[hem.origin(edges[i])] - mapped[hem.dest(edges[i])]).squaredNorm();
    }
    return e;
}

double harmonic_energy(std::span<const Vec3> source, std::span<const Vec3> mapped, const HalfEdgeMesh& hem) {
    if (source.size() != static_cast<std::size_t>(hem.num_vertices()) || mapped.size() != source.size()) {
        throw InvalidArgument("position arrays do not cover every vertex");
    }
    const auto k = cotangent_weights(source, hem);
    return harmonic_energy(k, mapped, hem);
}

Vec3 weighted_centroid(std::span<const Vec3> positions, std::span<const double> masses) {
    Vec3 c = Vec3::Zero();
    double total = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        c += masses[i] * positions[i];
        total += masses[i];
    }
    return total > 0 ? Vec3(c / total) : c;
}

Vec3 mobius_translate(const Vec3& x, const Vec3& a) {
    const Vec3 d = x - a;
    return (1.0 - a.squaredNorm()) * d / d.squaredNorm() - a;
}

double mobius_normalize(std::vector<Vec3>& sphere, std::span<const double> masses, double tol, int max_iters) {
    double total = 0.0;
    for (double m : masses) total += m;
    Vec3 c = weighted_centroid(sphere, masses);
    for (int it = 0; it < max_iters && c.norm() >= tol; ++it) {
        // Newton step: near a = 0 the centroid moves by (-2I + 2M) a.
        Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
        for (std::size_t i = 0; i < sphere.size(); ++i) second += masses[i] * sphere[i] * sphere[i].transpose();
        second /= total;
        const Eigen::Matrix3d jac = 2.0 * (Eigen::Matrix3d::Identity() - second);
        Vec3 a = jac.ldlt().solve(c);
        if (!a.allFinite()) a = 0.5 * c;
        const double len = a.norm();
        if (len > 0.5) a *= 0.5 / len;
        for (auto& x : sphere) {
            x = mobius_translate(x, a);
            x.normalize();
        }
        c = weighted_centroid(sphere, masses);
    }
    return c.norm();
}

SphericalMesh conformal_map_to_sphere(const Mesh& mesh, const ConformalOptions& options) {
    if (options.max_iters < 0 || options.energy_tol < 0 || options.step_size <= 0) {
        throw InvalidArgument("invalid conformal map options");
    }
    const TopologyReport report = analyze_topology(mesh);
    if (!report.genus_zero()) throw TopologyError("conformal map needs a genus-zero mesh: " + report.describe());

    const HalfEdgeMesh hem(mesh);
    const std::vector<double> k = cotangent_weights(mesh.vertices, hem);
    const WeightedGraph graph = build_graph(hem, k);
    const std::vector<double> masses = vertex_areas(mesh.vertices, mesh.faces);

    SphericalMesh sm;
    sm.base = mesh;
    sm.base.set_topology(report);

    const Vec3 center = weighted_centroid(mesh.vertices, masses);
    sm.sphere = central_projection(mesh.vertices, center);
    if (has_flipped_faces(sm.sphere, mesh.faces)) {
        sm.sphere = vertex_normals(mesh.vertices, mesh.faces);
    }
    mobius_normalize(sm.sphere, masses);

    double energy = harmonic_energy(k, sm.sphere, hem);
    sm.energy_trace.push_back(energy);

    const std::size_t n = sm.sphere.size();
    std::vector<Vec3> direction(n);
    std::vector<Vec3> candidate(n);
    double step = options.step_size;
    for (int it = 0; it < options.max_iters; ++it) {
        parallel_for(0, n, [&](std::size_t i) {
            Vec3 lap = Vec3::Zero();
            double wsum = 0.0;
            for (int p = graph.offsets[i]; p < graph.offsets[i + 1]; ++p) {
                lap += graph.weights[p] * (sm.sphere[graph.neighbors[p]] - sm.sphere[i]);
                wsum += graph.weights[p];
            }
            if (wsum <= 0) {
                direction[i].setZero();
                return;
            }
            lap /= wsum;
            direction[i] = lap - lap.dot(sm.sphere[i]) * sm.sphere[i];
        });

        bool accepted = false;
        double next_energy = energy;
        while (step >= 1e-8) {
            for (std::size_t i = 0; i < n; ++i) candidate[i] = (sm.sphere[i] + step * direction[i]).normalized();
            mobius_normalize(candidate, masses);
            next_energy = harmonic_energy(k, candidate, hem);
            if (next_energy <= energy) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        sm.iterations = it + 1;
        if (!accepted || energy - next_energy < options.energy_tol * next_energy) {
            sm.converged = true;
            break;
        }
        sm.sphere.swap(candidate);
        energy = next_energy;
        sm.energy_trace.push_back(energy);
        step = std::min(options.step_size, step * 1.5);
    }
    return sm;
}

Eigen::Matrix3d procrustes_rotation(std::span<const Vec3> from, std::span<const Vec3> to) {
    if (from.size() != to.size()) throw InvalidArgument("landmark lists differ in length");
    if (from.size() < 3) throw InvalidArgument("alignment needs at least 3 landmark pairs");
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d spread_from = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < from.size(); ++i) {
        cov += to[i] * from[i].transpose();
        spread_from += from[i] * from[i].transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> spread(spread_from);
    if (spread.eigenvalues()(1) <= 1e-10 * std::max(1.0, spread.eigenvalues()(2))) {
        throw InvalidArgument("landmark directions are collinear");
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
    return svd.matrixU() * d * svd.matrixV().transpose();
}

Eigen::Matrix3d align_spheres(const SphericalMesh& src, SphericalMesh& tar, const LandmarkSet& landmarks) {
    std::vector<Vec3> from, to;
    for (const auto& [s, t] : landmarks.vertex_pairs) {
        if (s < 0 || s >= static_cast<int>(src.sphere.size()) || t < 0 || t >= static_cast<int>(tar.sphere.size())) {
            throw InvalidArgument("landmark vertex id out of range: (" + std::to_string(s) + ", " + std::to_string(t) +
                                  ")");
        }
        to.push_back(src.sphere[s]);
        from.push_back(tar.sphere[t]);
    }
    for (const auto& [s, t] : landmarks.direction_pairs) {
        to.push_back(s.normalized());
        from.push_back(t.normalized());
    }
    const Eigen::Matrix3d r = procrustes_rotation(from, to);
    for (auto& x : tar.sphere) x = (r * x).normalized();
    return r;
}

DiskMap map_to_disk(const Mesh& disk) {
    const TopologyReport report = analyze_topology(disk);
    if (report.components != 1) {
        throw TopologyError("disk map needs a connected patch, got " + std::to_string(report.components) +
                            " components");
    }
    if (!report.manifold()) throw TopologyError("disk map needs a manifold patch: " + report.describe());
    const HalfEdgeMesh hem(disk);

    // Follow boundary half-edges into loops.
    const std::vector<int> bnd = hem.boundary_half_edges();
    if (bnd.empty()) throw TopologyError("patch has no boundary");
    std::vector<int> next_out(disk.num_vertices(), -1);
    for (int h : bnd) next_out[hem.origin(h)] = h;
    std::vector<char> used(hem.num_half_edges(), 0);
    std::vector<std::vector<int>> loops;
    for (int h0 : bnd) {
        if (used[h0]) continue;
        std::vector<int> loop;
        int h = h0;
        while (!used[h]) {
            used[h] = 1;
            loop.push_back(hem.origin(h));
            h = next_out[hem.dest(h)];
            if (h < 0) throw TopologyError("open boundary chain in patch");
        }
        loops.push_back(std::move(loop));
    }
    if (loops.size() != 1) {
        throw TopologyError("disk map needs one boundary loop, got " + std::to_string(loops.size()));
    }

    DiskMap out;
    out.boundary = std::move(loops.front());
    std::rotate(out.boundary.begin(), std::min_element(out.boundary.begin(), out.boundary.end()),
                out.boundary.end());

    const auto& p = disk.vertices;
    const std::size_t nb = out.boundary.size();
    std::vector<double> arc(nb + 1, 0.0);
    for (std::size_t i = 0; i < nb; ++i) {
        arc[i + 1] = arc[i] + (p[out.boundary[(i + 1) % nb]] - p[out.boundary[i]]).norm();
    }
    out.uv.assign(disk.num_vertices(), Eigen::Vector2d::Zero());
    std::vector<int> slot(disk.num_vertices(), -1);
    for (std::size_t i = 0; i < nb; ++i) {
        const double t = 2.0 * std::numbers::pi * arc[i] / arc[nb];
        out.uv[out.boundary[i]] = {std::cos(t), std::sin(t)};
        slot[out.boundary[i]] = -2;
    }
    int interior = 0;
    for (int v = 0; v < disk.num_vertices(); ++v) {
        if (slot[v] == -1) slot[v] = interior++;
    }
    if (interior == 0) return out;

    const std::vector<double> k = cotangent_weights(p, hem);
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(interior, 2);
    const auto& edges = hem.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int a = hem.origin(edges[e]);
        const int b = hem.dest(edges[e]);
        const double w = k[e];
        for (auto [i, j] : {std::pair{a, b}, std::pair{b, a}}) {
            if (slot[i] < 0) continue;
            trip.emplace_back(slot[i], slot[i], w);
            if (slot[j] >= 0) {
                trip.emplace_back(slot[i], slot[j], -w);
            } else {
                rhs.row(slot[i]) += w * out.uv[j].transpose();
            }
        }
    }
    Eigen::SparseMatrix<double> lap(interior, interior);
    lap.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
    if (solver.info() != Eigen::Success) throw NumericalError("disk Laplacian factorization failed");
    const Eigen::MatrixXd sol = solver.solve(rhs);
    for (int v = 0; v < disk.num_vertices(); ++v) {
        if (slot[v] >= 0) out.uv[v] = sol.row(slot[v]).transpose();
    }
    return out;
}

double disk_shape_energy(const Mesh& disk) {
    const DiskMap dm = map_to_disk(disk);
    const HalfEdgeMesh hem(disk);
    const std::vector<double> k = cotangent_weights(disk.vertices, hem);
    const auto& edges = hem.edges();
    double e = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        e += k[i] * (dm.uv[hem.origin(edges[i])] - dm.uv[hem.dest(edges[i])]).squaredNorm();
    }
    return edges.empty() ? 0.0 : e / static_cast<double>(edges.size());
}

Mesh inverse_map(const SphericalMesh& sm) { return sm.base; }

Mesh with_sphere_channel(const SphericalMesh& sm) {
    Mesh m = sm.base;
    m.set_vector(channel::kSphere, sm.sphere);
    return m;
}

SphericalMesh from_sphere_channel(const Mesh& mesh) {
    if (!mesh.has_vector(channel::kSphere)) {
        throw InvalidArgument(std::string("mesh has no '") + channel::kSphere + "' channel; run the map stage first");
    }
    SphericalMesh sm;
    sm.base = mesh;
    sm.sphere = mesh.vector(channel::kSphere);
    for (std::size_t i = 0; i < sm.sphere.size(); ++i) {
        if (std::abs(sm.sphere[i].norm() - 1.0) > 1e-5) {
            throw InvalidArgument("sphere position " + std::to_string(i) + " is not unit length");
        }
        sm.sphere[i].normalize();
    }
    sm.base.erase_channel(channel::kSphere);
    sm.converged = true;
    return sm;
}

std::vector<double> angle_distortion(std::span<const Vec3> base, std::span<const Vec3> mapped,
                                     std::span<const Face> faces) {
    std::vector<double> out(faces.size(), 0.0);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& t = faces[f];
        for (int c = 0; c < 3; ++c) {
            const int a = t[c], b = t[(c + 1) % 3], d = t[(c + 2) % 3];
            const double before = interior_angle(base[a], base[b], base[d]);
            const double after = interior_angle(mapped[a], mapped[b], mapped[d]);
            out[f] = std::max(out[f], std::abs(after - before));
        }
    }
    return out;
}

}  // namespace stylexfer
