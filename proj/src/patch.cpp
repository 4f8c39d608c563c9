#include "stylexfer/patch.hpp"

#include "stylexfer/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stylexfer {

namespace {

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    int join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return a;
    }

    int size(int x) { return size_[find(x)]; }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
};

std::vector<char> face_membership(std::span<const int> face_ids, int num_faces) {
    std::vector<char> in(num_faces, 0);
    for (int f : face_ids) in.at(f) = 1;
    return in;
}

}  // namespace

const Patch& PatchSet::at(int id) const {
    if (id < 0 || id >= static_cast<int>(patches.size())) throw InvalidArgument("no patch with id " + std::to_string(id));
    return patches[id];
}

std::vector<double> prefilter(const Mesh& mesh, const HalfEdgeMesh& hem, std::span<const double> values,
                              const PrefilterOptions& options) {
    const int n = mesh.num_vertices();
    if (static_cast<int>(values.size()) != n) throw InvalidArgument("prefilter input length differs from vertex count");
    const double h = mean_edge_length(mesh.vertices, hem);
    const double ss = options.sigma_s * (h > 0 ? h : 1.0);
    const double sr = options.sigma_r;

    std::vector<std::vector<int>> ring(n);
    for (int v = 0; v < n; ++v) ring[v] = hem.one_ring(v);

    std::vector<double> out(values.begin(), values.end());
    std::vector<double> tmp(n);
    for (int v = 0; v < n; ++v) {
        double acc = out[v], wsum = 1.0;
        for (int w : ring[v]) {
            const double d = (mesh.vertices[w] - mesh.vertices[v]).norm();
            const double dv = values[w] - values[v];
            const double wt = std::exp(-d * d / (2 * ss * ss)) * std::exp(-dv * dv / (2 * sr * sr));
            acc += wt * values[w];
            wsum += wt;
        }
        tmp[v] = acc / wsum;
    }
    out.swap(tmp);

    // Perona-Malik style conductance: large value jumps diffuse little.
    for (int it = 0; it < options.diffusion_iters; ++it) {
        for (int v = 0; v < n; ++v) {
            double flux = 0.0;
            for (int w : ring[v]) {
                const double dv = out[w] - out[v];
                flux += dv / (1.0 + (dv / sr) * (dv / sr));
            }
            tmp[v] = ring[v].empty() ? out[v] : out[v] + 0.5 * flux / static_cast<double>(ring[v].size());
        }
        out.swap(tmp);
    }
    for (double& x : out) {
        if (x > options.white_thresh) x = 1.0;
    }
    return out;
}

double otsu_threshold(std::span<const double> values, std::span<const double> weights, int bins) {
    if (values.empty()) return 0.0;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi - lo <= 0) return lo;
    std::vector<double> hist(bins, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int b = std::min(bins - 1, static_cast<int>((values[i] - lo) / (hi - lo) * bins));
        hist[b] += weights.empty() ? 1.0 : weights[i];
    }
    double total = 0.0, total_mean = 0.0;
    for (int b = 0; b < bins; ++b) {
        total += hist[b];
        total_mean += b * hist[b];
    }
    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int best_bin = 0;
    for (int b = 0; b < bins - 1; ++b) {
        w0 += hist[b];
        sum0 += b * hist[b];
        const double w1 = total - w0;
        if (w0 <= 0 || w1 <= 0) continue;
        const double m0 = sum0 / w0;
        const double m1 = (total_mean - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            best_bin = b;
        }
    }
    return lo + (best_bin + 1) * (hi - lo) / bins;
}

std::vector<int> vertex_labels(const Mesh& mesh, std::span<const int> face_labels) {
    const int n = mesh.num_vertices();
    int max_label = 0;
    for (int l : face_labels) max_label = std::max(max_label, l);
    std::vector<std::vector<int>> counts(n);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        for (int v : mesh.faces[f]) {
            auto& c = counts[v];
            if (c.empty()) c.assign(max_label + 1, 0);
            ++c[face_labels[f]];
        }
    }
    std::vector<int> out(n, -1);
    for (int v = 0; v < n; ++v) {
        if (counts[v].empty()) continue;
        out[v] = static_cast<int>(std::max_element(counts[v].begin(), counts[v].end()) - counts[v].begin());
    }
    return out;
}

std::vector<std::vector<int>> extract_boundary(std::span<const int> face_ids, const HalfEdgeMesh& hem) {
    const std::vector<char> in = face_membership(face_ids, hem.num_faces());
    auto is_boundary = [&](int h) { return in[hem.face(h)] && (hem.twin(h) < 0 || !in[hem.face(hem.twin(h))]); };

    std::vector<int> starts;
    for (int f : face_ids) {
        for (int k = 0; k < 3; ++k) {
            if (is_boundary(3 * f + k)) starts.push_back(3 * f + k);
        }
    }
    std::sort(starts.begin(), starts.end());

    std::vector<char> used(hem.num_half_edges(), 0);
    std::vector<std::vector<int>> loops;
    for (int h0 : starts) {
        if (used[h0]) continue;
        std::vector<int> loop;
        int h = h0;
        while (!used[h]) {
            used[h] = 1;
            loop.push_back(hem.origin(h));
            // Swing around dest(h) through patch faces to the next boundary edge.
            int g = hem.next(h);
            while (!is_boundary(g)) g = hem.next(hem.twin(g));
            h = g;
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

Patch extend_boundary(Patch patch, const HalfEdgeMesh& hem) {
    std::vector<char> member(hem.num_vertices(), 0);
    for (int v : patch.vertex_ids) member[v] = 1;
    std::vector<int> added;
    for (const auto& loop : patch.boundary_loops) {
        for (int v : loop) {
            for (int w : hem.one_ring(v)) {
                if (!member[w]) {
                    member[w] = 1;
                    added.push_back(w);
                }
            }
        }
    }
    patch.vertex_ids.insert(patch.vertex_ids.end(), added.begin(), added.end());
    std::sort(patch.vertex_ids.begin(), patch.vertex_ids.end());
    return patch;
}

PatchSet patches_from_face_labels(const Mesh& mesh, const HalfEdgeMesh& hem, std::vector<int> face_labels) {
    if (static_cast<int>(face_labels.size()) != mesh.num_faces()) {
        throw InvalidArgument("face label count differs from face count");
    }
    int max_label = 0;
    for (int l : face_labels) {
        if (l < 0) throw InvalidArgument("negative face label");
        max_label = std::max(max_label, l);
    }
    PatchSet set;
    set.patches.resize(max_label + 1);
    for (int f = 0; f < mesh.num_faces(); ++f) set.patches[face_labels[f]].face_ids.push_back(f);
    for (int id = 0; id <= max_label; ++id) {
        Patch& p = set.patches[id];
        if (p.face_ids.empty()) throw InvalidArgument("patch " + std::to_string(id) + " has no faces");
        p.id = id;
        p.is_background = id == 0;
        p.area = patch_area(mesh, p.face_ids);
        std::vector<char> member(mesh.num_vertices(), 0);
        for (int f : p.face_ids) {
            for (int v : mesh.faces[f]) member[v] = 1;
        }
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            if (member[v]) p.vertex_ids.push_back(v);
        }
        p.boundary_loops = extract_boundary(p.face_ids, hem);
        p = extend_boundary(std::move(p), hem);
    }
    set.vertex_labels = vertex_labels(mesh, face_labels);
    set.face_labels = std::move(face_labels);
    set.degenerate = max_label == 0;
    return set;
}

PatchSet segment(const Mesh& mesh, const HalfEdgeMesh& hem, std::span<const double> filtered,
                 const SegmentOptions& options) {
    const int nf = mesh.num_faces();
    if (static_cast<int>(filtered.size()) != mesh.num_vertices()) {
        throw InvalidArgument("segmentation input length differs from vertex count");
    }
    if (options.min_size < 1) throw InvalidArgument("min_size must be positive");

    std::vector<double> fv(nf);
    for (int f = 0; f < nf; ++f) {
        const Face& t = mesh.faces[f];
        fv[f] = (filtered[t[0]] + filtered[t[1]] + filtered[t[2]]) / 3.0;
    }
    // Default scale: k / |C| is compared against value steps with |C| counted
    // in faces, so k grows with the face count to keep the same surface
    // fraction at any resolution. Ranges below 1e-6 are rounding noise.
    const auto [lo, hi] = std::minmax_element(filtered.begin(), filtered.end());
    const double range = std::max(*hi - *lo, 1e-6);
    const double k = options.k ? *options.k : range * nf / 200.0;
    if (k < 0) throw InvalidArgument("segmentation scale k must be non-negative");

    struct Edge {
        int a, b;
        double w;
    };
    std::vector<Edge> edges;
    for (int h : hem.edges()) {
        if (hem.twin(h) < 0) continue;
        const int a = hem.face(h), b = hem.face(hem.twin(h));
        edges.push_back({a, b, std::abs(fv[a] - fv[b])});
    }
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.w < y.w; });

    UnionFind uf(nf);
    std::vector<double> thresh(nf, k);
    for (const Edge& e : edges) {
        const int a = uf.find(e.a), b = uf.find(e.b);
        if (a == b) continue;
        if (e.w <= thresh[a] && e.w <= thresh[b]) {
            const int r = uf.join(a, b);
            thresh[r] = e.w + k / uf.size(r);
        }
    }
    for (const Edge& e : edges) {
        const int a = uf.find(e.a), b = uf.find(e.b);
        if (a != b && (uf.size(a) < options.min_size || uf.size(b) < options.min_size)) uf.join(a, b);
    }

    // Component statistics, keyed by root.
    std::vector<double> areas(nf, 0.0), sums(nf, 0.0);
    std::vector<int> first_face(nf, -1);
    std::vector<double> face_areas(nf);
    for (int f = 0; f < nf; ++f) {
        face_areas[f] = face_area(mesh.vertices, mesh.faces[f]);
        const int r = uf.find(f);
        areas[r] += face_areas[f];
        sums[r] += face_areas[f] * fv[f];
        if (first_face[r] < 0) first_face[r] = f;
    }
    std::vector<int> roots;
    for (int f = 0; f < nf; ++f) {
        if (uf.find(f) == f) roots.push_back(f);
    }
    std::sort(roots.begin(), roots.end(), [&](int x, int y) { return first_face[x] < first_face[y]; });

    const double otsu = otsu_threshold(fv, face_areas);
    int background = -1;
    for (int r : roots) {
        const double mean = areas[r] > 0 ? sums[r] / areas[r] : 0.0;
        if (mean < otsu && (background < 0 || areas[r] > areas[background])) background = r;
    }
    if (background < 0) {
        for (int r : roots) {
            if (background < 0 || areas[r] > areas[background]) background = r;
        }
    }

    std::vector<int> label_of_root(nf, -1);
    label_of_root[background] = 0;
    int next = 1;
    for (int r : roots) {
        if (r != background) label_of_root[r] = next++;
    }
    std::vector<int> labels(nf);
    for (int f = 0; f < nf; ++f) labels[f] = label_of_root[uf.find(f)];

    PatchSet set = patches_from_face_labels(mesh, hem, std::move(labels));
    set.k = k;
    set.otsu_threshold = otsu;
    if (roots.size() < 2) {
        set.degenerate = true;
        set.warnings.push_back("segmentation found a single component; everything is background");
    }
    return set;
}

std::vector<Property> source_properties() {
    return {Property::kCurvature, Property::kComposition, Property::kConcentration, Property::kHue,
            Property::kSaturation};
}

std::vector<Property> target_properties() {
    return {Property::kCurvature, Property::kComposition, Property::kConcentration};
}

std::vector<char> patch_mask(const Patch& patch, int num_vertices) {
    std::vector<char> mask(num_vertices, 0);
    for (int v : patch.vertex_ids) mask.at(v) = 1;
    return mask;
}

std::map<Property, FitResult> build_patch_pdfs(const Patch& patch, const Mesh& mesh, const SphericalFitter& fitter,
                                               std::span<const Property> properties) {
    const std::vector<char> mask = patch_mask(patch, mesh.num_vertices());
    std::map<Property, FitResult> out;
    for (Property p : properties) {
        const std::string name(property_channel(p));
        if (!mesh.has_scalar(name)) throw InvalidArgument("mesh has no '" + name + "' channel");
        out.emplace(p, fitter.fit(p, mesh.scalar(name), mask));
    }
    return out;
}

}  // namespace stylexfer
