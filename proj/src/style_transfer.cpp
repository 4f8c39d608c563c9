#include "stylexfer/style_transfer.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/material.hpp"
#include "stylexfer/parallel.hpp"

#include <cmath>

namespace stylexfer {

void TransferOptions::validate() const {
    if (order < 1) throw ConfigError("order must be at least 1");
    weights.normalized();
    assign.validate();
    if (fit.regularization < 0) throw ConfigError("regularization must be non-negative");
    if (segment.min_size < 1) throw ConfigError("min_size must be positive");
    if (segment.k && !(*segment.k >= 0)) throw ConfigError("segmentation k must be non-negative");
    if (prefilter.diffusion_iters < 0) throw ConfigError("diffusion_iters must be non-negative");
    if (!(prefilter.sigma_s > 0) || !(prefilter.sigma_r > 0)) throw ConfigError("prefilter sigmas must be positive");
    if (conformal.max_iters < 0 || !(conformal.energy_tol >= 0) || !(conformal.step_size > 0)) {
        throw ConfigError("invalid conformal map options");
    }
}

SphericalMesh map_stage(const Mesh& mesh, const ConformalOptions& options) {
    return conformal_map_to_sphere(mesh, options);
}

void extract_stage(Mesh& mesh, bool appearance) {
    extract_measurements(mesh);
    const HalfEdgeMesh hem(mesh);
    mesh.set_scalar(channel::kCurvature, normal_curvatures(mesh, hem));
    if (!appearance) return;
    if (mesh.has_scalar(channel::kHue) && mesh.has_scalar(channel::kSaturation)) return;
    if (!mesh.has_vector(channel::kColor)) {
        throw InvalidArgument("source mesh needs 'hue' and 'saturation' channels or a 'color' channel");
    }
    const auto& color = mesh.vector(channel::kColor);
    std::vector<double> h(color.size()), s(color.size());
    for (std::size_t i = 0; i < color.size(); ++i) {
        const Vec3 hsv = rgb_to_hsv(color[i]);
        h[i] = hsv.x();
        s[i] = hsv.y();
    }
    mesh.set_scalar(channel::kHue, std::move(h));
    mesh.set_scalar(channel::kSaturation, std::move(s));
}

PatchSet segment_stage(Mesh& mesh, const PrefilterOptions& prefilter_options, const SegmentOptions& segment_options) {
    if (!mesh.has_scalar(channel::kConcentration)) {
        throw InvalidArgument("segmentation needs the 'concentration' channel; run extract first");
    }
    const HalfEdgeMesh hem(mesh);
    std::vector<double> filtered = prefilter(mesh, hem, mesh.scalar(channel::kConcentration), prefilter_options);
    PatchSet set = segment(mesh, hem, filtered, segment_options);
    mesh.set_scalar("filtered", std::move(filtered));
    mesh.set_scalar(channel::kPatchId, std::vector<double>(set.vertex_labels.begin(), set.vertex_labels.end()));
    return set;
}

SphericalFitter make_fitter(const SphericalMesh& sm, int order, const FitOptions& options) {
    return SphericalFitter(sm.sphere, sphere_vertex_weights(sm.sphere, sm.base.faces), order, options);
}

std::vector<PatchPdfs> fit_stage(const SphericalMesh& sm, const PatchSet& patches, std::span<const Property> properties,
                                 int order, const FitOptions& options) {
    const SphericalFitter fitter = make_fitter(sm, order, options);
    std::vector<PatchPdfs> out(patches.patches.size());
    parallel_for(0, out.size(), [&](std::size_t i) {
        const Patch& p = patches.patches[i];
        out[i].id = p.id;
        for (auto& [prop, fit] : build_patch_pdfs(p, sm.base, fitter, properties)) {
            out[i].residual_rms[prop] = fit.residual_rms;
            out[i].pdfs.emplace(prop, std::move(fit.pdf));
        }
    });
    return out;
}

MatchResult match_stage(const Mesh& src_base, const PatchSet& src_patches, const std::vector<PatchPdfs>& src_pdfs,
                        const Mesh& tar_base, const PatchSet& tar_patches, const std::vector<PatchPdfs>& tar_pdfs,
                        const MatchWeights& weights, bool normalize) {
    auto describe = [](const Mesh& base, const PatchSet& set, const std::vector<PatchPdfs>& pdfs) {
        if (pdfs.size() != set.patches.size()) throw InvalidArgument("PDF list does not cover every patch");
        std::vector<PatchDescriptor> out(set.patches.size());
        parallel_for(0, out.size(), [&](std::size_t i) {
            std::map<Property, PDF> sel;
            for (Property p : target_properties()) sel.emplace(p, pdfs[i].pdfs.at(p));
            out[i] = describe_patch(base, set.patches[i], std::move(sel));
        });
        return out;
    };
    const auto src = describe(src_base, src_patches, src_pdfs);
    const auto tar = describe(tar_base, tar_patches, tar_pdfs);
    if (src_patches.foreground_count() == 0 && tar_patches.foreground_count() == 0) {
        MatchResult r;
        r.weights = weights.normalized();
        r.normalized = normalize;
        MatchEntry bg;
        bg.tar_id = 0;
        bg.src_id = 0;
        bg.raw = raw_costs(src.front(), tar.front());
        bg.costs = bg.raw;
        bg.total = bg.raw.weighted(r.weights);
        r.matches.push_back(bg);
        return r;
    }
    return match_patches(src, tar, weights, normalize);
}

namespace {

std::vector<double> shifted(const std::vector<double>& hues, double shift) {
    std::vector<double> out(hues.size());
    for (std::size_t i = 0; i < hues.size(); ++i) out[i] = wrap_unit(hues[i] + shift);
    return out;
}

}  // namespace

TransferResult transfer_stage(const SphericalMesh& src, const PatchSet& src_patches, const SphericalMesh& tar,
                              const PatchSet& tar_patches, const MatchResult& matches, const TransferOptions& options) {
    options.assign.validate();
    const int n = options.order;
    const SphericalFitter src_fit = make_fitter(src, n, options.fit);
    const SphericalFitter tar_fit = make_fitter(tar, n, options.fit);
    const Mesh& sb = src.base;
    const Mesh& tb = tar.base;
    for (const char* name : {channel::kConcentration, channel::kComposition, channel::kHue, channel::kSaturation}) {
        if (!sb.has_scalar(name)) throw InvalidArgument(std::string("source mesh has no '") + name + "' channel");
    }
    for (const char* name : {channel::kConcentration, channel::kComposition, channel::kValue}) {
        if (!tb.has_scalar(name)) throw InvalidArgument(std::string("target mesh has no '") + name + "' channel");
    }

    TransferResult out;
    out.patches.resize(tar_patches.patches.size());
    out.maps.resize(tar_patches.patches.size());
    parallel_for(0, tar_patches.patches.size(), [&](std::size_t t) {
        const Patch& tp = tar_patches.patches[t];
        const Patch& sp = src_patches.at(matches.source_for(tp.id));
        const std::vector<char> smask = patch_mask(sp, sb.num_vertices());
        const std::vector<char> tmask = patch_mask(tp, tb.num_vertices());

        std::vector<double> inside;
        for (int v : sp.vertex_ids) inside.push_back(sb.scalar(channel::kHue)[v]);
        const double shift = wrap_unit(0.5 - circular_mean(inside));

        const PDF src_c = src_fit.fit(Property::kConcentration, sb.scalar(channel::kConcentration), smask).pdf;
        const PDF src_s = src_fit.fit(Property::kSaturation, sb.scalar(channel::kSaturation), smask).pdf;
        const PDF src_m =
            src_fit.fit(Property::kComposition, shifted(sb.scalar(channel::kComposition), shift), smask).pdf;
        const PDF src_h = src_fit.fit(Property::kHue, shifted(sb.scalar(channel::kHue), shift), smask).pdf;
        const PDF tar_c = tar_fit.fit(Property::kConcentration, tb.scalar(channel::kConcentration), tmask).pdf;
        const PDF tar_m =
            tar_fit.fit(Property::kComposition, shifted(tb.scalar(channel::kComposition), shift), tmask).pdf;

        PatchMaps& maps = out.maps[t];
        maps.tar_id = tp.id;
        maps.src_id = sp.id;
        maps.hue_shift = shift;
        maps.tau_cs = compute_material_map(src_c, src_s);
        maps.tau_mh = compute_material_map(src_m, src_h);
        maps.q_c = compute_pdm(src_c, tar_c);
        maps.q_m = compute_pdm(src_m, tar_m);
        maps.q_s = saturation_transform(maps.tau_cs, maps.q_c, options.assign.mu_s, options.assign.f_s,
                                        options.assign.raw_sigma);
        maps.q_h = hue_transform(maps.tau_mh, maps.q_m, options.assign.mu_h);

        ReconstructedPatch& rp = out.patches[t];
        rp.id = tp.id;
        rp.hue = apply_pdm(maps.q_h, src_h);
        rp.saturation = apply_pdm(maps.q_s, src_s);
        rp.hue_shift = shift;
    });

    const HalfEdgeMesh hem(tb);
    out.blend_sigma = options.assign.blend_sigma * mean_sphere_edge_length(tar.sphere, hem);
    out.result = blend_and_compose(tb, tar.sphere, tar_patches, out.patches, out.blend_sigma);
    return out;
}

namespace {

template <class Fn>
auto run_stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace

TransferArtifacts style_transfer(const Mesh& src, const Mesh& tar, const TransferOptions& options) {
    run_stage("config", [&] {
        options.validate();
        return 0;
    });
    TransferArtifacts a;
    a.src = run_stage("map", [&] { return map_stage(src, options.conformal); });
    a.tar = run_stage("map", [&] { return map_stage(tar, options.conformal); });
    if (!options.landmarks.empty()) {
        a.alignment = run_stage("align", [&] { return align_spheres(a.src, a.tar, options.landmarks); });
    }
    run_stage("extract", [&] {
        extract_stage(a.src.base, true);
        extract_stage(a.tar.base, false);
        return 0;
    });
    a.src_patches = run_stage("segment", [&] { return segment_stage(a.src.base, options.prefilter, options.segment); });
    a.tar_patches = run_stage("segment", [&] { return segment_stage(a.tar.base, options.prefilter, options.segment); });
    a.src_pdfs = run_stage("fit", [&] {
        const auto props = source_properties();
        return fit_stage(a.src, a.src_patches, props, options.order, options.fit);
    });
    a.tar_pdfs = run_stage("fit", [&] {
        const auto props = target_properties();
        return fit_stage(a.tar, a.tar_patches, props, options.order, options.fit);
    });
    a.matches = run_stage("match", [&] {
        return match_stage(a.src.base, a.src_patches, a.src_pdfs, a.tar.base, a.tar_patches, a.tar_pdfs,
                           options.weights, options.normalize_costs);
    });
    a.transfer = run_stage("transfer", [&] {
        return transfer_stage(a.src, a.src_patches, a.tar, a.tar_patches, a.matches, options);
    });
    SphericalMesh reconstructed = a.tar;
    reconstructed.base = a.transfer.result;
    a.result = inverse_map(reconstructed);
    return a;
}

}  // namespace stylexfer
