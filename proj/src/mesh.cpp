#include "stylexfer/mesh.hpp"

#include "stylexfer/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace stylexfer {
namespace {

std::uint64_t edge_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

double corner_angle(const Vec3& at, const Vec3& p, const Vec3& q) {
    const Vec3 u = p - at;
    const Vec3 w = q - at;
    return std::atan2(u.cross(w).norm(), u.dot(w));
}

}  // namespace

std::string TopologyReport::describe() const {
    std::ostringstream os;
    os << "V=" << vertices << " E=" << edges << " F=" << faces << " chi=" << euler_characteristic
       << " components=" << components;
    auto list_edges = [&](const char* label, const std::vector<std::pair<int, int>>& es) {
        if (es.empty()) return;
        os << "; " << es.size() << ' ' << label << ':';
        const std::size_t shown = std::min<std::size_t>(es.size(), 16);
        for (std::size_t i = 0; i < shown; ++i) os << " (" << es[i].first << ',' << es[i].second << ')';
        if (shown < es.size()) os << " ...";
    };
    list_edges("boundary edges", boundary_edges);
    list_edges("non-manifold edges", nonmanifold_edges);
    if (!nonmanifold_vertices.empty()) os << "; " << nonmanifold_vertices.size() << " non-manifold vertices";
    if (!degenerate_faces.empty()) os << "; " << degenerate_faces.size() << " degenerate faces";
    return os.str();
}

const std::vector<double>& Mesh::scalar(const std::string& name) const {
    auto it = scalars_.find(name);
    if (it == scalars_.end()) throw InvalidArgument("missing scalar channel '" + name + "'");
    return it->second;
}

const std::vector<Vec3>& Mesh::vector(const std::string& name) const {
    auto it = vectors_.find(name);
    if (it == vectors_.end()) throw InvalidArgument("missing vector channel '" + name + "'");
    return it->second;
}

void Mesh::set_scalar(const std::string& name, std::vector<double> values) {
    if (values.size() != vertices.size()) {
        throw InvalidArgument("channel '" + name + "' has " + std::to_string(values.size()) +
                              " entries, mesh has " + std::to_string(vertices.size()) + " vertices");
    }
    scalars_[name] = std::move(values);
}

void Mesh::set_vector(const std::string& name, std::vector<Vec3> values) {
    if (values.size() != vertices.size()) {
        throw InvalidArgument("channel '" + name + "' has " + std::to_string(values.size()) +
                              " entries, mesh has " + std::to_string(vertices.size()) + " vertices");
    }
    vectors_[name] = std::move(values);
}

void Mesh::erase_channel(const std::string& name) {
    scalars_.erase(name);
    vectors_.erase(name);
}

void Mesh::check_invariants() const {
    const int n = num_vertices();
    for (int f = 0; f < num_faces(); ++f) {
        for (int idx : faces[f]) {
            if (idx < 0 || idx >= n) {
                throw InvalidArgument("face " + std::to_string(f) + " references vertex " +
                                      std::to_string(idx) + " of " + std::to_string(n));
            }
        }
    }
    for (const auto& [name, values] : scalars_) {
        if (static_cast<int>(values.size()) != n) throw InvalidArgument("channel '" + name + "' length mismatch");
    }
    for (const auto& [name, values] : vectors_) {
        if (static_cast<int>(values.size()) != n) throw InvalidArgument("channel '" + name + "' length mismatch");
    }
}

HalfEdgeMesh::HalfEdgeMesh(const Mesh& mesh) : num_vertices_(mesh.num_vertices()) {
    const int nf = mesh.num_faces();
    origin_.resize(3 * static_cast<std::size_t>(nf));
    twin_.assign(origin_.size(), -1);
    vertex_out_.assign(num_vertices_, -1);

    std::unordered_map<std::uint64_t, int> directed;
    directed.reserve(origin_.size() * 2);
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            const int h = 3 * f + k;
            const int a = mesh.faces[f][k];
            const int b = mesh.faces[f][(k + 1) % 3];
            if (a < 0 || a >= num_vertices_ || b < 0 || b >= num_vertices_) {
                throw TopologyError("face " + std::to_string(f) + " has out-of-range vertex index");
            }
            origin_[h] = a;
            if (!directed.emplace(edge_key(a, b), h).second) {
                throw TopologyError("directed edge (" + std::to_string(a) + "," + std::to_string(b) +
                                    ") occurs twice: non-manifold or inconsistently oriented");
            }
        }
    }
    for (int h = 0; h < num_half_edges(); ++h) {
        auto it = directed.find(edge_key(dest(h), origin(h)));
        if (it != directed.end()) twin_[h] = it->second;
    }
    for (int h = 0; h < num_half_edges(); ++h) {
        if (twin_[h] < 0 || h < twin_[h]) edges_.push_back(h);
    }
    // Prefer a boundary outgoing half-edge so fans start at the boundary.
    for (int h = 0; h < num_half_edges(); ++h) {
        const int v = origin_[h];
        if (vertex_out_[v] < 0) vertex_out_[v] = h;
        if (twin_[h] < 0) vertex_out_[v] = h;
    }
}

std::vector<int> HalfEdgeMesh::outgoing(int v) const {
    std::vector<int> out;
    const int start = vertex_out_[v];
    if (start < 0) return out;
    int h = start;
    do {
        out.push_back(h);
        const int t = twin_[prev(h)];
        if (t < 0) break;
        h = t;
    } while (h != start);
    return out;
}

std::vector<int> HalfEdgeMesh::one_ring(int v) const {
    std::vector<int> ring;
    const auto out = outgoing(v);
    ring.reserve(out.size() + 1);
    for (int h : out) ring.push_back(dest(h));
    // Open fan: the last neighbor is reached only through the closing edge.
    if (!out.empty() && twin_[prev(out.back())] < 0) ring.push_back(origin_[prev(out.back())]);
    return ring;
}

bool HalfEdgeMesh::is_boundary_vertex(int v) const {
    const int h = vertex_out_[v];
    return h >= 0 && twin_[h] < 0;
}

std::vector<int> HalfEdgeMesh::boundary_half_edges() const {
    std::vector<int> out;
    for (int h = 0; h < num_half_edges(); ++h) {
        if (twin_[h] < 0) out.push_back(h);
    }
    return out;
}

bool HalfEdgeMesh::check_involutions() const {
    for (int h = 0; h < num_half_edges(); ++h) {
        if (next(next(next(h))) != h) return false;
        if (twin_[h] >= 0 && twin_[twin_[h]] != h) return false;
        if (twin_[h] >= 0 && (origin(twin_[h]) != dest(h) || dest(twin_[h]) != origin(h))) return false;
    }
    return true;
}

TopologyReport analyze_topology(const Mesh& mesh) {
    TopologyReport r;
    r.vertices = mesh.num_vertices();
    r.faces = mesh.num_faces();

    struct EdgeUse {
        int forward = 0;
        int backward = 0;
    };
    std::map<std::pair<int, int>, EdgeUse> uses;
    for (int f = 0; f < r.faces; ++f) {
        const Face& t = mesh.faces[f];
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            r.degenerate_faces.push_back(f);
            continue;
        }
        for (int k = 0; k < 3; ++k) {
            const int a = t[k];
            const int b = t[(k + 1) % 3];
            auto& u = uses[{std::min(a, b), std::max(a, b)}];
            (a < b ? u.forward : u.backward) += 1;
        }
    }
    r.edges = static_cast<int>(uses.size());
    for (const auto& [e, u] : uses) {
        const int total = u.forward + u.backward;
        if (total == 1) {
            r.boundary_edges.push_back(e);
        } else if (total > 2 || u.forward != 1 || u.backward != 1) {
            r.nonmanifold_edges.push_back(e);
        }
    }
    r.euler_characteristic = r.vertices - r.edges + r.faces;

    // Connected components over vertices.
    DisjointSet comps(r.vertices);
    std::vector<char> used(r.vertices, 0);
    for (const Face& t : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            used[t[k]] = 1;
            comps.unite(t[k], t[(k + 1) % 3]);
        }
    }
    for (int v = 0; v < r.vertices; ++v) {
        if (comps.find(v) == v) ++r.components;
    }

    // Vertex fans: incident faces sharing an edge through v must form one fan.
    std::vector<std::vector<int>> incident(r.vertices);
    for (int f = 0; f < r.faces; ++f) {
        for (int v : mesh.faces[f]) incident[v].push_back(f);
    }
    for (int v = 0; v < r.vertices; ++v) {
        const auto& fs = incident[v];
        if (fs.size() < 2) continue;
        DisjointSet fan(static_cast<int>(fs.size()));
        std::map<int, int> first_face_with_neighbor;
        for (int i = 0; i < static_cast<int>(fs.size()); ++i) {
            for (int w : mesh.faces[fs[i]]) {
                if (w == v) continue;
                auto [it, inserted] = first_face_with_neighbor.emplace(w, i);
                if (!inserted) fan.unite(it->second, i);
            }
        }
        int roots = 0;
        for (int i = 0; i < static_cast<int>(fs.size()); ++i) roots += fan.find(i) == i;
        if (roots > 1) r.nonmanifold_vertices.push_back(v);
    }
    return r;
}

void require_genus_zero(Mesh& mesh) {
    TopologyReport report = analyze_topology(mesh);
    if (!report.genus_zero()) {
        std::string why;
        if (!report.closed()) why = "mesh is not closed";
        else if (!report.manifold()) why = "mesh is not a manifold";
        else if (report.components != 1) why = "mesh has " + std::to_string(report.components) + " components";
        else why = "genus is not zero";
        throw TopologyError(why + " (" + report.describe() + ")");
    }
    mesh.set_topology(std::move(report));
}

double face_area(std::span<const Vec3> p, const Face& f) {
    return 0.5 * (p[f[1]] - p[f[0]]).cross(p[f[2]] - p[f[0]]).norm();
}

Vec3 face_normal(std::span<const Vec3> p, const Face& f) {
    const Vec3 n = (p[f[1]] - p[f[0]]).cross(p[f[2]] - p[f[0]]);
    const double len = n.norm();
    return len > 0 ? Vec3(n / len) : Vec3::Zero();
}

double patch_area(const Mesh& mesh, std::span<const int> face_ids) {
    double area = 0.0;
    for (int f : face_ids) area += face_area(mesh.vertices, mesh.faces[f]);
    return area;
}

double total_area(const Mesh& mesh) {
    double area = 0.0;
    for (const Face& f : mesh.faces) area += face_area(mesh.vertices, f);
    return area;
}

std::vector<double> vertex_areas(std::span<const Vec3> positions, std::span<const Face> faces) {
    std::vector<double> areas(positions.size(), 0.0);
    for (const Face& f : faces) {
        const double third = face_area(positions, f) / 3.0;
        for (int v : f) areas[v] += third;
    }
    return areas;
}

std::vector<Vec3> vertex_normals(std::span<const Vec3> positions, std::span<const Face> faces) {
    std::vector<Vec3> normals(positions.size(), Vec3::Zero());
    for (const Face& f : faces) {
        const Vec3 n = face_normal(positions, f);
        for (int k = 0; k < 3; ++k) {
            const double angle =
                corner_angle(positions[f[k]], positions[f[(k + 1) % 3]], positions[f[(k + 2) % 3]]);
            normals[f[k]] += angle * n;
        }
    }
    for (auto& n : normals) {
        const double len = n.norm();
        if (len > 0) n /= len;
    }
    return normals;
}

namespace {

Vec3 angle_weighted_normal(const Mesh& mesh, const HalfEdgeMesh& hem, int v) {
    Vec3 n = Vec3::Zero();
    for (int h : hem.outgoing(v)) {
        const Face& f = mesh.faces[hem.face(h)];
        const Vec3& p = mesh.vertices[v];
        const Vec3& a = mesh.vertices[hem.dest(h)];
        const Vec3& b = mesh.vertices[hem.origin(hem.prev(h))];
        n += corner_angle(p, a, b) * face_normal(mesh.vertices, f);
    }
    const double len = n.norm();
    return len > 0 ? Vec3(n / len) : n;
}

}  // namespace

double vertex_normal_curvature(const Mesh& mesh, const HalfEdgeMesh& hem, int v) {
    const auto ring = hem.one_ring(v);
    if (ring.empty()) throw InvalidArgument("vertex " + std::to_string(v) + " has no incident edges");
    const Vec3 n = angle_weighted_normal(mesh, hem, v);
    const Vec3& p = mesh.vertices[v];
    double sum = 0.0;
    for (int w : ring) {
        const Vec3 d = p - mesh.vertices[w];
        sum += 2.0 * n.dot(d) / d.squaredNorm();
    }
    return sum / static_cast<double>(ring.size());
}

std::vector<double> normal_curvatures(const Mesh& mesh, const HalfEdgeMesh& hem) {
    std::vector<double> k(mesh.num_vertices(), 0.0);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!hem.outgoing(v).empty()) k[v] = vertex_normal_curvature(mesh, hem, v);
    }
    return k;
}

double mean_edge_length(std::span<const Vec3> positions, const HalfEdgeMesh& hem) {
    if (hem.num_edges() == 0) return 0.0;
    double sum = 0.0;
    for (int h : hem.edges()) sum += (positions[hem.origin(h)] - positions[hem.dest(h)]).norm();
    return sum / hem.num_edges();
}

double opposite_cotangent(std::span<const Vec3> positions, const HalfEdgeMesh& hem, int h) {
    const Vec3& a = positions[hem.origin(h)];
    const Vec3& b = positions[hem.dest(h)];
    const Vec3& o = positions[hem.origin(hem.prev(h))];
    const Vec3 u = a - o;
    const Vec3 w = b - o;
    const double cross = u.cross(w).norm();
    if (cross <= 1e-300) {
        throw NumericalError("zero-area triangle at face " + std::to_string(hem.face(h)) +
                             ": cotangent weight undefined");
    }
    return u.dot(w) / cross;
}

std::vector<double> cotangent_weights(std::span<const Vec3> positions, const HalfEdgeMesh& hem) {
    std::vector<double> k(hem.num_edges(), 0.0);
    const auto& edges = hem.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int h = edges[e];
        double w = opposite_cotangent(positions, hem, h);
        if (hem.twin(h) >= 0) w += opposite_cotangent(positions, hem, hem.twin(h));
        k[e] = std::max(0.0, 0.5 * w);
    }
    return k;
}

SubMesh extract_submesh(const Mesh& mesh, std::span<const int> face_ids) {
    SubMesh sub;
    std::vector<int> local(mesh.num_vertices(), -1);
    for (int f : face_ids) {
        Face t{};
        for (int k = 0; k < 3; ++k) {
            const int v = mesh.faces[f][k];
            if (local[v] < 0) {
                local[v] = static_cast<int>(sub.vertex_map.size());
                sub.vertex_map.push_back(v);
                sub.mesh.vertices.push_back(mesh.vertices[v]);
            }
            t[k] = local[v];
        }
        sub.mesh.faces.push_back(t);
    }
    for (const auto& [name, values] : mesh.scalars()) {
        std::vector<double> sv;
        sv.reserve(sub.vertex_map.size());
        for (int v : sub.vertex_map) sv.push_back(values[v]);
        sub.mesh.set_scalar(name, std::move(sv));
    }
    for (const auto& [name, values] : mesh.vectors()) {
        std::vector<Vec3> sv;
        sv.reserve(sub.vertex_map.size());
        for (int v : sub.vertex_map) sv.push_back(values[v]);
        sub.mesh.set_vector(name, std::move(sv));
    }
    return sub;
}

}  // namespace stylexfer
