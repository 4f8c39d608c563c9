// Acceptance run: one PASS/FAIL line per primary criterion, exit status 1 when
// any criterion fails.

#include "oracles.hpp"
#include "stylexfer/config.hpp"
#include "stylexfer/evaluate.hpp"
#include "stylexfer/material.hpp"
#include "stylexfer/shapes.hpp"
#include "stylexfer/stages.hpp"
#include "stylexfer/style_transfer.hpp"
#include "stylexfer/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace stylexfer;
using namespace stylexfer::shapes;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

Vec3 vec(const oracle::V3& v) { return {v[0], v[1], v[2]}; }

oracle::Matrix to_oracle(const Eigen::MatrixXd& m) {
    oracle::Matrix out(m.rows(), std::vector<double>(m.cols()));
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    }
    return out;
}

// Band 0 of a non-negative property field is sqrt(4 pi) times its mean, so it
// is drawn positive.
PDF random_pdf(int order, std::mt19937_64& rng, Property p) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> pos(0.2, 3.0);
    std::vector<Eigen::VectorXd> bands;
    for (int i = 0; i <= order; ++i) {
        Eigen::VectorXd b(2 * i + 1);
        for (int k = 0; k < b.size(); ++k) b(k) = g(rng);
        if (i == 0) b(0) = pos(rng);
        bands.push_back(b);
    }
    return PDF(p, bands);
}

// Mean absolute error of each source patch's own hue/saturation fit,
// evaluated on the vertices the patch owns, without blending. Hue is shifted
// to a circular mean of 0.5 before fitting, as the transfer does.
std::pair<double, double> own_patch_residual(const TransferArtifacts& art, int order) {
    const SphericalMesh& sm = art.src;
    const Mesh& m = sm.base;
    const auto& hue = m.scalar(channel::kHue);
    const auto& sat = m.scalar(channel::kSaturation);
    const SphericalFitter fitter = make_fitter(sm, order, FitOptions{});
    const int n = m.num_vertices();
    double err_h = 0.0, err_s = 0.0;
    for (const Patch& p : art.src_patches.patches) {
        const std::vector<char> mask = patch_mask(p, n);
        std::vector<double> hv;
        for (int v : p.vertex_ids) hv.push_back(hue[v]);
        const double shift = 0.5 - circular_mean(hv);
        std::vector<double> shifted(n);
        for (int v = 0; v < n; ++v) shifted[v] = wrap_unit(hue[v] + shift);
        const auto fh = fitter.evaluate(fitter.fit(Property::kHue, shifted, mask).pdf);
        const auto fs = fitter.evaluate(fitter.fit(Property::kSaturation, sat, mask).pdf);
        for (int v = 0; v < n; ++v) {
            if (art.src_patches.vertex_labels[v] != p.id) continue;
            err_h += oracle::circular_distance(fh[v] - shift, hue[v]);
            err_s += std::abs(std::clamp(fs[v], 0.0, 1.0) - sat[v]);
        }
    }
    return {err_h / n, err_s / n};
}

Outcome identity_transfer() {
    struct Fixture {
        std::string name;
        SyntheticSpec spec;
    };
    SyntheticSpec bl;
    bl.shape = "egg";
    bl.spots = 0;
    bl.band_limited = true;
    SyntheticSpec spots;
    spots.shape = "egg";
    spots.spots = 5;
    std::vector<Fixture> fixtures{{"band-limited", bl}, {"K=5", spots}};

    Outcome o{true, ""};
    for (const auto& f : fixtures) {
        const auto t0 = Clock::now();
        const SyntheticData d = gen_synthetic(f.spec, 7);
        TransferOptions opt;
        opt.assign.mu_s = opt.assign.mu_h = 1.0;
        opt.assign.f_s = 0.0;
        const TransferArtifacts art = style_transfer(d.source, d.source, opt);
        const EvalReport r = evaluate(art.result, d.source);
        const double secs = seconds_since(t0);
        const auto [res_h, res_s] = own_patch_residual(art, opt.order);
        const bool ok = r.accuracy_hue >= 0.99 - res_h && r.accuracy_sat >= 0.99 - res_s && secs < 120;
        o.pass = o.pass && ok;
        o.detail += fmt("%s V=%d hue %.4f (>= %.4f) sat %.4f (>= %.4f) %.1fs; ", f.name.c_str(),
                        d.source.num_vertices(), r.accuracy_hue, 0.99 - res_h, r.accuracy_sat, 0.99 - res_s, secs);
    }
    return o;
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("stylexfer_acceptance_" + name);
    fs::remove_all(d);
    return d;
}

PipelineConfig demo_config(const fs::path& out) {
    PipelineConfig c = load_config(fs::path(STYLEXFER_SOURCE_DIR) / "data" / "demo.json");
    c.out_dir = out;
    c.cache = false;
    return c;
}

Outcome generator_oracle() {
    const auto t0 = Clock::now();
    std::ostringstream log;
    const RunSummary s = run_all(demo_config(scratch("demo")), log);
    const double secs = seconds_since(t0);
    const EvalReport& r = *s.report;
    return {r.accuracy_hue >= 0.95 && r.accuracy_sat >= 0.95 && secs < 300,
            fmt("hue %.4f sat %.4f at n=16, V=%d, %.1fs", r.accuracy_hue, r.accuracy_sat, r.vertices, secs)};
}

Outcome pdm_identities() {
    std::mt19937_64 rng(2718);
    double map_err = 0.0, ortho_err = 0.0, det_r_err = 0.0, det_t_rel = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int order = 1 + trial % 16;
        const PDF src = random_pdf(order, rng, Property::kConcentration);
        const PDF tar = random_pdf(order, rng, Property::kConcentration);
        const PDM pdm = compute_pdm(src, tar);
        for (int i = 0; i <= order; ++i) {
            map_err = std::max(map_err, (pdm.bands[i] * src.band(i) - tar.band(i)).cwiseAbs().maxCoeff());
            const auto r = to_oracle(pdm.rotations[i]);
            const int n = 2 * i + 1;
            ortho_err = std::max(ortho_err, oracle::max_abs_diff(oracle::multiply(oracle::transpose(r), r),
                                                                 oracle::identity(n)));
            det_r_err = std::max(det_r_err, std::abs(oracle::determinant(r) - 1.0));
            const double expected = std::pow(tar.band(i).norm() / src.band(i).norm(), n);
            det_t_rel = std::max(det_t_rel, std::abs(oracle::determinant(to_oracle(pdm.bands[i])) - expected) / expected);
        }
    }
    return {map_err < 1e-9 && ortho_err < 1e-9 && det_r_err < 1e-7 && det_t_rel < 1e-7,
            fmt("max |T P_src - P_tar| %.2e, |R^T R - I| %.2e, |det R - 1| %.2e, det T rel %.2e", map_err, ortho_err,
                det_r_err, det_t_rel)};
}

Outcome cost_sanity() {
    bool ok = true;
    int fixtures = 0, pdfs = 0;
    std::vector<SyntheticSpec> specs(3);
    specs[0].spots = 5;
    specs[1].spots = 3;
    specs[1].shape = "ellipsoid";
    specs[2].spots = 4;
    specs[2].shape = "sphere";
    for (std::size_t k = 0; k < specs.size(); ++k) {
        specs[k].level = 4;
        const SyntheticData d = gen_synthetic(specs[k], 11 + k);
        TransferOptions opt;
        const TransferArtifacts art = style_transfer(d.source, d.source, opt);
        ++fixtures;
        std::vector<PatchDescriptor> desc;
        for (std::size_t p = 0; p < art.src_pdfs.size(); ++p) {
            for (const auto& [prop, pdf] : art.src_pdfs[p].pdfs) {
                ok = ok && pdm_cost(compute_pdm(pdf, pdf)) == 0.0;
                ++pdfs;
            }
            std::map<Property, PDF> sel;
            for (Property prop : target_properties()) sel.emplace(prop, art.src_pdfs[p].pdfs.at(prop));
            desc.push_back(describe_patch(art.src.base, art.src_patches.patches[p], sel));
        }
        for (const auto& m : match_patches(desc, desc, opt.weights).matches) ok = ok && m.src_id == m.tar_id;
        for (const auto& m : art.matches.matches) ok = ok && m.src_id == m.tar_id;
    }
    PDM hand;
    Eigen::MatrixXd r90(2, 2);
    r90 << 0, -1, 1, 0;
    hand.bands = {2.0 * r90};
    const double c = pdm_cost(hand);
    ok = ok && std::abs(c - 3.0) < 1e-15;
    return {ok, fmt("self cost 0 on %d PDFs over %d fixtures, self-match identity, 2-d example cost %.15g", pdfs,
                    fixtures, c)};
}

Outcome neutral_collapse() {
    std::mt19937_64 rng(31415);
    double dev = 0.0;
    for (int order = 1; order <= 16; ++order) {
        for (int t = 0; t < 4; ++t) {
            const PDM tau_cs = compute_material_map(random_pdf(order, rng, Property::kConcentration),
                                                    random_pdf(order, rng, Property::kSaturation));
            const PDM tau_mh = compute_material_map(random_pdf(order, rng, Property::kComposition),
                                                    random_pdf(order, rng, Property::kHue));
            const PDM qs = saturation_transform(tau_cs, identity_pdm(Property::kConcentration, order), 1.0, 0.0);
            const PDM qh = hue_transform(tau_mh, identity_pdm(Property::kComposition, order), 1.0);
            for (int i = 0; i <= order; ++i) {
                const auto eye = Eigen::MatrixXd::Identity(2 * i + 1, 2 * i + 1);
                dev = std::max({dev, (qs.bands[i] - eye).norm(), (qh.bands[i] - eye).norm()});
            }
        }
    }
    return {dev < 1e-9, fmt("max per-band deviation %.2e over orders 1-16", dev)};
}

Outcome sh_suite() {
    // Monte-Carlo Gram matrix of bands 0-6
    const int order = 6, nc = sh_count(order);
    const int samples = 2'000'000, chunk = 50'000;
    std::mt19937_64 rng(161803);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nc, nc), y(chunk, nc);
    std::vector<double> row(nc);
    for (int done = 0; done < samples; done += chunk) {
        for (int s = 0; s < chunk; ++s) {
            sh_basis_all(order, vec(oracle::random_direction(rng)), row);
            for (int c = 0; c < nc; ++c) y(s, c) = row[c];
        }
        gram.noalias() += y.transpose() * y;
    }
    gram *= 4 * M_PI / samples;
    const double gram_err = (gram - Eigen::MatrixXd::Identity(nc, nc)).cwiseAbs().maxCoeff();

    // Band-limited round trip and rotation invariance on an icosphere grid
    const Mesh grid = icosphere(5);
    std::vector<Vec3> dirs;
    for (const Vec3& p : grid.vertices) dirs.push_back(p.normalized());
    const auto weights = sphere_vertex_weights(dirs, grid.faces);
    const std::vector<char> mask(dirs.size(), 1);
    // Property-scale field (mean 0.5, small higher bands) at the default
    // regularization, whose bias grows with the coefficient norm; and the
    // same fit without regularization on unit-variance coefficients.
    std::normal_distribution<double> small(0.0, 0.02);
    Eigen::VectorXd c(sh_count(16));
    for (int i = 0; i < c.size(); ++i) c(i) = small(rng);
    c(0) = 0.5 * std::sqrt(4 * M_PI);
    const PDF field = PDF::from_flat(Property::kSaturation, 16, c);
    const double residual =
        SphericalFitter(dirs, weights, 16).fit(Property::kSaturation, synthesize(field, dirs), mask).residual_rms;
    FitOptions exact;
    exact.regularization = 0.0;
    const PDF wide = random_pdf(16, rng, Property::kConcentration);
    const double residual_exact = SphericalFitter(dirs, weights, 16, exact)
                                      .fit(Property::kConcentration, synthesize(wide, dirs), mask)
                                      .residual_rms;

    const SphericalFitter fit6(dirs, weights, 6);
    double norm_err = 0.0;
    for (int t = 0; t < 10; ++t) {
        const PDF p = random_pdf(6, rng, Property::kConcentration);
        const auto rot = oracle::random_rotation(rng);
        std::vector<double> rotated(dirs.size());
        for (std::size_t v = 0; v < dirs.size(); ++v) {
            rotated[v] = eval_pdf(p, vec(oracle::rotate(rot, {dirs[v].x(), dirs[v].y(), dirs[v].z()})));
        }
        const auto a = band_norms(p);
        const auto b = band_norms(fit6.fit(Property::kConcentration, rotated, mask).pdf);
        for (std::size_t i = 0; i < a.size(); ++i) norm_err = std::max(norm_err, std::abs(a[i] - b[i]));
    }
    return {gram_err < 1e-2 && residual < 1e-8 && residual_exact < 1e-8 && norm_err < 1e-6,
            fmt("Gram max dev %.2e (N=%d), round-trip residual %.2e at n=16 (%.2e unregularized), band-norm "
                "change %.2e",
                gram_err, samples, residual, residual_exact, norm_err)};
}

Outcome conformal_suite() {
    const Mesh sphere = icosphere(4);
    const SphericalMesh fixed = conformal_map_to_sphere(sphere);
    double fixed_err = 0.0;
    for (int v = 0; v < sphere.num_vertices(); ++v) {
        fixed_err = std::max(fixed_err, (fixed.sphere[v] - sphere.vertices[v]).norm());
    }
    bool monotone = true;
    double norm_err = 0.0, centroid = 0.0;
    for (const Mesh& m : {ellipsoid(4, 1.0, 1.6, 0.7), egg(4, 1.0, 1.3, 0.25)}) {
        const SphericalMesh sm = conformal_map_to_sphere(m);
        for (std::size_t i = 1; i < sm.energy_trace.size(); ++i) {
            monotone = monotone && sm.energy_trace[i] <= sm.energy_trace[i - 1];
        }
        for (const Vec3& p : sm.sphere) norm_err = std::max(norm_err, std::abs(p.norm() - 1.0));
        centroid = std::max(centroid, weighted_centroid(sm.sphere, vertex_areas(m.vertices, m.faces)).norm());
    }
    return {fixed_err < 1e-6 && monotone && norm_err < 1e-6 && centroid < 1e-4,
            fmt("fixed point %.2e, traces %s, unit-norm dev %.2e, centroid %.2e", fixed_err,
                monotone ? "monotone" : "NOT monotone", norm_err, centroid)};
}

Outcome segmentation_recovery() {
    int exact = 0, total = 0;
    std::string misses;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SyntheticSpec spec;
        spec.spots = 5;
        spec.contrast = 0.55;
        spec.separation_edges = 3.0;
        const SyntheticData d = gen_synthetic(spec, seed);
        for (const Mesh* side : {&d.source, &d.target}) {
            Mesh m = *side;
            extract_stage(m, false);
            const PatchSet ps = segment_stage(m, {}, {});
            ++total;
            if (static_cast<int>(ps.patches.size()) == spec.spots + 1) {
                ++exact;
            } else {
                misses += fmt(" seed %d:%d", static_cast<int>(seed), static_cast<int>(ps.patches.size()));
            }
        }
    }
    return {exact == total, fmt("%d/%d meshes (source and target, seeds 1-20) give K+1 = 6 patches%s", exact, total,
                                misses.c_str())};
}

Outcome presets() {
    bool ok = true;
    std::string sums;
    for (const auto& name : MatchWeights::preset_names()) {
        const PipelineConfig c = config_from_json(Json{{"source", "s.ply"}, {"target", "t.ply"}, {"preset", name}});
        const MatchWeights& w = c.transfer.weights;
        const double s = w.alpha + w.beta + w.gamma + w.delta + w.lambda;
        ok = ok && std::abs(s - 1.0) < 1e-12;
        sums += fmt(" %s=%.3g", name.c_str(), s);
    }
    const MatchWeights d = MatchWeights::preset("paper-diffcolor"), t = MatchWeights::preset("paper-teaser");
    ok = ok && std::abs(d.delta - 0.35) < 1e-12 && std::abs(d.lambda - 0.05) < 1e-12;
    ok = ok && std::abs(t.delta - 0.25) < 1e-12 && std::abs(t.lambda - 0.15) < 1e-12;
    const double s0 = frequency_weight(0, 150, 1.0, true), s150 = frequency_weight(150, 150, 1.0, true);
    ok = ok && s0 == 151.0 && s150 == 301.0;
    return {ok, fmt("sums%s; raw sigma^0 = %g, sigma^150 = %g", sums.c_str(), s0, s150)};
}

Outcome determinism() {
    std::ostringstream log;
    const RunSummary a = run_all(demo_config(scratch("det_a")), log);
    const RunSummary b = run_all(demo_config(scratch("det_b")), log);
    auto bytes = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    const std::string ra = bytes(a.report_path), rb = bytes(b.report_path);
    return {!ra.empty() && ra == rb, fmt("report %zu bytes, identical: %s", ra.size(), ra == rb ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"identity transfer", identity_transfer},
        {"generator oracle end-to-end", generator_oracle},
        {"PDM identities", pdm_identities},
        {"cost function sanity", cost_sanity},
        {"neutral collapse", neutral_collapse},
        {"SH suite", sh_suite},
        {"conformal suite", conformal_suite},
        {"segmentation recovery", segmentation_recovery},
        {"paper-parameter presets", presets},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
