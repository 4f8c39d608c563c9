#include "stylexfer/matching.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/parallel.hpp"
#include "stylexfer/pdm.hpp"
#include "stylexfer/spheremap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace stylexfer {

MatchWeights MatchWeights::normalized() const {
    const std::array<double, 5> w{alpha, beta, gamma, delta, lambda};
    double sum = 0.0;
    for (double x : w) {
        if (!std::isfinite(x) || x < 0) throw ConfigError("match weights must be finite and non-negative");
        sum += x;
    }
    if (sum <= 0) throw ConfigError("match weights sum to zero");
    return {alpha / sum, beta / sum, gamma / sum, delta / sum, lambda / sum};
}

MatchWeights MatchWeights::preset(const std::string& name) {
    if (name == "paper-similar") return MatchWeights{0.2, 0.2, 0.2, 0.2, 0.2}.normalized();
    if (name == "paper-diffcolor") return MatchWeights{0.2, 0.2, 0.2, 0.35, 0.05}.normalized();
    if (name == "paper-teaser") return MatchWeights{0.2, 0.2, 0.2, 0.25, 0.15}.normalized();
    throw ConfigError("unknown weight preset '" + name + "'");
}

std::vector<std::string> MatchWeights::preset_names() { return {"paper-similar", "paper-diffcolor", "paper-teaser"}; }

double patch_shape_energy(const Mesh& base, const Patch& patch) {
    Mesh plain;
    plain.vertices = base.vertices;
    plain.faces = base.faces;
    const SubMesh sub = extract_submesh(plain, patch.face_ids);
    try {
        return disk_shape_energy(sub.mesh);
    } catch (const TopologyError& e) {
        throw TopologyError("patch " + std::to_string(patch.id) + ": " + e.what());
    }
}

PatchDescriptor describe_patch(const Mesh& base, const Patch& patch, std::map<Property, PDF> pdfs) {
    PatchDescriptor d;
    d.id = patch.id;
    d.area = patch.area;
    d.shape_energy = patch.is_background ? 0.0 : patch_shape_energy(base, patch);
    d.pdfs = std::move(pdfs);
    return d;
}

double shape_cost(const PatchDescriptor& src, const PatchDescriptor& tar) {
    return std::abs(src.shape_energy - tar.shape_energy);
}

double area_cost(const PatchDescriptor& src, const PatchDescriptor& tar) { return std::abs(src.area - tar.area); }

namespace {

const PDF& pdf_of(const PatchDescriptor& d, Property p) {
    const auto it = d.pdfs.find(p);
    if (it == d.pdfs.end()) {
        throw InvalidArgument("patch " + std::to_string(d.id) + " has no " + std::string(property_name(p)) + " PDF");
    }
    return it->second;
}

}  // namespace

CostTerms raw_costs(const PatchDescriptor& src, const PatchDescriptor& tar) {
    CostTerms c;
    c.shape = shape_cost(src, tar);
    c.area = area_cost(src, tar);
    c.curvature = pdm_cost(compute_pdm(pdf_of(src, Property::kCurvature), pdf_of(tar, Property::kCurvature)));
    c.composition =
        pdm_cost(compute_pdm(pdf_of(src, Property::kComposition), pdf_of(tar, Property::kComposition)));
    c.concentration =
        pdm_cost(compute_pdm(pdf_of(src, Property::kConcentration), pdf_of(tar, Property::kConcentration)));
    return c;
}

int MatchResult::source_for(int tar_id) const {
    for (const auto& m : matches) {
        if (m.tar_id == tar_id) return m.src_id;
    }
    throw InvalidArgument("target patch " + std::to_string(tar_id) + " has no match");
}

MatchResult match_patches(const std::vector<PatchDescriptor>& src, const std::vector<PatchDescriptor>& tar,
                          const MatchWeights& weights, bool normalize) {
    MatchResult result;
    result.weights = weights.normalized();
    result.normalized = normalize;

    std::vector<const PatchDescriptor*> sf, tf;
    const PatchDescriptor* src_bg = nullptr;
    const PatchDescriptor* tar_bg = nullptr;
    for (const auto& d : src) {
        if (d.id == 0) {
            src_bg = &d;
        } else {
            sf.push_back(&d);
        }
    }
    for (const auto& d : tar) {
        if (d.id == 0) {
            tar_bg = &d;
        } else {
            tf.push_back(&d);
        }
    }
    if (sf.empty() || tf.empty()) {
        throw InvalidArgument("matching needs foreground patches on both sides (source " + std::to_string(sf.size()) +
                              ", target " + std::to_string(tf.size()) + ")");
    }
    auto by_id = [](const PatchDescriptor* a, const PatchDescriptor* b) { return a->id < b->id; };
    std::sort(sf.begin(), sf.end(), by_id);
    std::sort(tf.begin(), tf.end(), by_id);
    for (auto* d : sf) result.src_ids.push_back(d->id);
    for (auto* d : tf) result.tar_ids.push_back(d->id);

    const std::size_t ns = sf.size(), nt = tf.size();
    std::vector<CostTerms> raw(ns * nt);
    parallel_for(0, ns * nt, [&](std::size_t k) { raw[k] = raw_costs(*sf[k % ns], *tf[k / ns]); });

    std::vector<CostTerms> scaled = raw;
    if (normalize) {
        using Member = double CostTerms::*;
        for (Member m : {&CostTerms::shape, &CostTerms::area, &CostTerms::curvature, &CostTerms::composition,
                         &CostTerms::concentration}) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto& c : raw) {
                lo = std::min(lo, c.*m);
                hi = std::max(hi, c.*m);
            }
            for (auto& c : scaled) c.*m = hi > lo ? (c.*m - lo) / (hi - lo) : 0.0;
        }
    }

    if (src_bg && tar_bg) {
        MatchEntry bg;
        bg.tar_id = 0;
        bg.src_id = 0;
        bg.raw = raw_costs(*src_bg, *tar_bg);
        bg.costs = bg.raw;
        bg.total = bg.raw.weighted(result.weights);
        result.matches.push_back(bg);
    }
    result.total.assign(nt, std::vector<double>(ns, 0.0));
    for (std::size_t t = 0; t < nt; ++t) {
        std::size_t best = 0;
        for (std::size_t s = 0; s < ns; ++s) {
            result.total[t][s] = scaled[t * ns + s].weighted(result.weights);
            if (result.total[t][s] < result.total[t][best]) best = s;
        }
        MatchEntry e;
        e.tar_id = tf[t]->id;
        e.src_id = sf[best]->id;
        e.raw = raw[t * ns + best];
        e.costs = scaled[t * ns + best];
        e.total = result.total[t][best];
        result.matches.push_back(e);
    }
    return result;
}

}  // namespace stylexfer
