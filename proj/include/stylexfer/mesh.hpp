#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stylexfer {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

/// Well-known per-vertex channel names.
namespace channel {
inline constexpr const char* kBispectral = "bispectral_rgb";  // vec3, [0,1]
inline constexpr const char* kSphere = "sphere";              // vec3, unit
inline constexpr const char* kColor = "color";                // vec3, reconstructed rgb
inline constexpr const char* kHue = "hue";
inline constexpr const char* kSaturation = "saturation";
inline constexpr const char* kValue = "value";
inline constexpr const char* kConcentration = "concentration";
inline constexpr const char* kComposition = "composition";
inline constexpr const char* kCurvature = "curvature";
inline constexpr const char* kPatchId = "patch_id";
}  // namespace channel

/// Result of a connectivity check.
struct TopologyReport {
    int vertices = 0;
    int edges = 0;
    int faces = 0;
    int euler_characteristic = 0;
    int components = 0;
    std::vector<std::pair<int, int>> boundary_edges;
    std::vector<std::pair<int, int>> nonmanifold_edges;
    std::vector<int> nonmanifold_vertices;
    std::vector<int> degenerate_faces;

    bool closed() const { return boundary_edges.empty(); }
    bool manifold() const {
        return nonmanifold_edges.empty() && nonmanifold_vertices.empty() && degenerate_faces.empty();
    }
    /// Closed, connected, orientable manifold with V - E + F = 2.
    bool genus_zero() const {
        return closed() && manifold() && components == 1 && euler_characteristic == 2;
    }
    std::string describe() const;
};

/// Triangle mesh with named per-vertex channels. Scalar and 3-vector channels
/// live in separate maps; every channel holds exactly one entry per vertex.
class Mesh {
public:
    std::vector<Vec3> vertices;
    std::vector<Face> faces;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_faces() const { return static_cast<int>(faces.size()); }

    bool has_scalar(const std::string& name) const { return scalars_.count(name) != 0; }
    bool has_vector(const std::string& name) const { return vectors_.count(name) != 0; }

    /// Throws InvalidArgument when the channel is missing.
    const std::vector<double>& scalar(const std::string& name) const;
    const std::vector<Vec3>& vector(const std::string& name) const;

    /// Throws InvalidArgument when the length differs from the vertex count.
    void set_scalar(const std::string& name, std::vector<double> values);
    void set_vector(const std::string& name, std::vector<Vec3> values);
    void erase_channel(const std::string& name);

    const std::map<std::string, std::vector<double>>& scalars() const { return scalars_; }
    const std::map<std::string, std::vector<Vec3>>& vectors() const { return vectors_; }

    /// Connectivity report attached by load_mesh or validate().
    const std::optional<TopologyReport>& topology() const { return topology_; }
    void set_topology(TopologyReport report) { topology_ = std::move(report); }

    /// Index and channel-length checks; throws on violation.
    void check_invariants() const;

private:
    std::map<std::string, std::vector<double>> scalars_;
    std::map<std::string, std::vector<Vec3>> vectors_;
    std::optional<TopologyReport> topology_;
};

/// Half-edge connectivity derived from a Mesh. Half-edge 3f+k runs from
/// faces[f][k] to faces[f][(k+1)%3]. twin() is -1 on boundary half-edges.
class HalfEdgeMesh {
public:
    /// Throws TopologyError when a directed edge occurs twice (non-manifold or
    /// inconsistently oriented input).
    explicit HalfEdgeMesh(const Mesh& mesh);

    int num_vertices() const { return num_vertices_; }
    int num_faces() const { return static_cast<int>(origin_.size() / 3); }
    int num_half_edges() const { return static_cast<int>(origin_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    int next(int h) const { return h - h % 3 + (h % 3 + 1) % 3; }
    int prev(int h) const { return h - h % 3 + (h % 3 + 2) % 3; }
    int twin(int h) const { return twin_[h]; }
    int origin(int h) const { return origin_[h]; }
    int dest(int h) const { return origin_[next(h)]; }
    int face(int h) const { return h / 3; }

    /// Representative half-edge for each undirected edge (the one with twin
    /// index greater than itself, or the boundary one).
    const std::vector<int>& edges() const { return edges_; }

    /// Outgoing half-edges of v in rotational order. For boundary vertices the
    /// fan starts at the boundary. Empty for isolated vertices.
    std::vector<int> outgoing(int v) const;
    std::vector<int> one_ring(int v) const;

    bool is_boundary_vertex(int v) const;
    std::vector<int> boundary_half_edges() const;

    /// twin(twin(h)) == h and next-cycles of length 3 for every half-edge.
    bool check_involutions() const;

private:
    int num_vertices_ = 0;
    std::vector<int> origin_;
    std::vector<int> twin_;
    std::vector<int> vertex_out_;
    std::vector<int> edges_;
};

/// Full connectivity analysis; never throws on bad topology.
TopologyReport analyze_topology(const Mesh& mesh);

/// Throws TopologyError with a diagnostic when the mesh is not a closed
/// genus-zero manifold; attaches the report otherwise.
void require_genus_zero(Mesh& mesh);

double face_area(std::span<const Vec3> positions, const Face& f);
Vec3 face_normal(std::span<const Vec3> positions, const Face& f);

/// Sum of triangle areas over the listed faces. Empty set gives 0.
double patch_area(const Mesh& mesh, std::span<const int> face_ids);
double total_area(const Mesh& mesh);

/// One third of the incident triangle areas per vertex.
std::vector<double> vertex_areas(std::span<const Vec3> positions, std::span<const Face> faces);

/// Angle-weighted average of incident face normals, normalized.
std::vector<Vec3> vertex_normals(std::span<const Vec3> positions, std::span<const Face> faces);

/// Mean over incident edges (v,w) of 2<n_v, p_v - p_w> / |p_v - p_w|^2 with
/// the angle-weighted normal n_v. Throws InvalidArgument for isolated vertices.
double vertex_normal_curvature(const Mesh& mesh, const HalfEdgeMesh& hem, int v);
std::vector<double> normal_curvatures(const Mesh& mesh, const HalfEdgeMesh& hem);

double mean_edge_length(std::span<const Vec3> positions, const HalfEdgeMesh& hem);

/// Interior-angle cotangent at the vertex opposite half-edge h.
double opposite_cotangent(std::span<const Vec3> positions, const HalfEdgeMesh& hem, int h);

/// String constants k_ij = (cot a + cot b) / 2 per edge in hem.edges() order,
/// clamped at zero. Throws NumericalError on zero-area triangles.
std::vector<double> cotangent_weights(std::span<const Vec3> positions, const HalfEdgeMesh& hem);

/// Sub-mesh made of the listed faces; vertex_map[i] is the parent index of
/// sub-mesh vertex i. Scalar and vector channels are carried over.
struct SubMesh {
    Mesh mesh;
    std::vector<int> vertex_map;
};
SubMesh extract_submesh(const Mesh& mesh, std::span<const int> face_ids);

}  // namespace stylexfer
