#include "stylexfer/stages.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/fsutil.hpp"
#include "stylexfer/hashing.hpp"
#include "stylexfer/material.hpp"
#include "stylexfer/mesh_io.hpp"
#include "stylexfer/plot.hpp"
#include "stylexfer/synthetic.hpp"

#include <cmath>
#include <ostream>

namespace stylexfer {

namespace {

std::vector<Property> role_properties(const std::string& role) {
    if (role == "source") return source_properties();
    if (role == "target") return target_properties();
    throw ConfigError("fit role must be 'source' or 'target', got '" + role + "'");
}

void save(const Mesh& mesh, const fs::path& path, const ArtifactMeta& meta,
          const std::string& rgb = channel::kBispectral) {
    make_parent_dirs(path);
    SaveOptions o;
    o.rgb_channel = mesh.has_vector(rgb) ? rgb : std::string(channel::kBispectral);
    o.comments = meta.ply_comments();
    save_mesh(mesh, path, o);
}

SphericalMesh load_mapped(const fs::path& path) { return from_sphere_channel(load_mesh(path)); }

struct Side {
    SphericalMesh sm;
    PatchSet patches;
    std::vector<PatchPdfs> pdfs;
};

Side load_side(const SideFiles& f, bool with_pdfs) {
    Side s;
    s.sm = load_mapped(f.mesh);
    s.patches = patch_set_from_json(read_json(f.manifest), s.sm.base);
    if (with_pdfs) {
        s.pdfs = patch_pdfs_from_json(read_json(f.pdfs));
        if (s.pdfs.size() != s.patches.patches.size()) {
            throw InvalidArgument(f.pdfs.string() + " has " + std::to_string(s.pdfs.size()) + " patches, manifest has " +
                                  std::to_string(s.patches.patches.size()));
        }
    }
    return s;
}

Json patch_maps_json(const TransferResult& t) {
    Json out = Json::array();
    for (std::size_t i = 0; i < t.maps.size(); ++i) {
        const PatchMaps& m = t.maps[i];
        out.push_back({{"tar_id", m.tar_id},
                       {"src_id", m.src_id},
                       {"hue_shift", m.hue_shift},
                       {"tau_cs", to_json(m.tau_cs)},
                       {"tau_mh", to_json(m.tau_mh)},
                       {"q_c", to_json(m.q_c)},
                       {"q_m", to_json(m.q_m)},
                       {"q_s", to_json(m.q_s)},
                       {"q_h", to_json(m.q_h)},
                       {"hue", to_json(t.patches[i].hue)},
                       {"saturation", to_json(t.patches[i].saturation)}});
    }
    return {{"maps", out}, {"blend_sigma", t.blend_sigma}};
}

std::vector<double> normalized(const std::vector<double>& v) {
    double lo = INFINITY, hi = -INFINITY;
    for (double x : v) {
        if (!std::isfinite(x)) continue;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    std::vector<double> out(v.size(), 0.0);
    if (!(hi > lo)) return out;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::isfinite(v[i]) ? (v[i] - lo) / (hi - lo) : 0.0;
    return out;
}

}  // namespace

std::string stage_key(const std::string& stage, const Json& params, const std::vector<fs::path>& inputs) {
    Json j = {{"stage", stage}, {"params", params}, {"inputs", Json::array()}};
    for (const auto& p : inputs) j["inputs"].push_back(sha256_file(p));
    return sha256_hex(j.dump());
}

fs::path stamp_path(const fs::path& output) {
    fs::path p = output;
    p += ".stamp";
    return p;
}

StageOutcome run_cached(const std::string& stage, const Json& params, const std::vector<fs::path>& inputs,
                        const std::vector<fs::path>& outputs, bool use_cache, const std::function<void()>& fn) {
    if (outputs.empty()) throw InvalidArgument("stage '" + stage + "' declares no outputs");
    for (const auto& in : inputs) {
        if (!fs::exists(in)) throw IoError("input not found: " + in.string());
    }
    StageOutcome outcome;
    outcome.stage = stage;
    outcome.key = stage_key(stage, params, inputs);
    const fs::path stamp = stamp_path(outputs.front());

    if (use_cache && fs::exists(stamp)) {
        bool hit = true;
        try {
            const Json s = read_json(stamp);
            hit = s.value("key", "") == outcome.key;
            for (const auto& out : outputs) {
                if (!hit) break;
                const std::string name = out.filename().string();
                hit = fs::exists(out) && s.contains("outputs") && s["outputs"].value(name, "") == sha256_file(out);
            }
        } catch (const Error&) {
            hit = false;
        }
        if (hit) {
            outcome.cache_hit = true;
            return outcome;
        }
    }

    // Keep the error category (it selects the exit code) and tag the stage.
    try {
        fn();
    } catch (const StageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError("[" + stage + "] " + e.what());
    } catch (const IoError& e) {
        throw IoError("[" + stage + "] " + e.what());
    } catch (const ParseError& e) {
        throw ParseError("[" + stage + "] " + e.what());
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
    Json s = {{"stage", stage}, {"key", outcome.key}, {"outputs", Json::object()}};
    for (const auto& out : outputs) {
        if (!fs::exists(out)) throw IoError("stage '" + stage + "' did not write " + out.string());
        s["outputs"][out.filename().string()] = sha256_file(out);
    }
    write_json(stamp, s);
    return outcome;
}

Json ArtifactMeta::with(const Json& artifact) const {
    Json j = artifact;
    j["meta"] = fields;
    return j;
}

std::vector<std::string> ArtifactMeta::ply_comments() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : fields.items()) {
        if (value.is_primitive() && !value.is_null()) {
            std::string s = value.is_string() ? value.get<std::string>() : value.dump();
            for (char& c : s) {
                if (c == '\n' || c == '\r') c = ' ';
            }
            out.push_back(key + " " + s);
        }
    }
    return out;
}

ArtifactMeta make_meta(const std::string& stage, const Json& params) {
    ArtifactMeta m;
    m.fields = {{"version", kVersion}, {"stage", stage}, {"params_hash", sha256_hex(params.dump())}, {"params", params}};
    return m;
}

GenPaths gen_paths(const fs::path& dir) {
    return {dir / "source.ply", dir / "target.ply", dir / "ground_truth.ply", dir / "landmarks.json"};
}

StageOutcome gen_file(const SyntheticRun& run, const fs::path& dir, const ArtifactMeta& meta, bool cache) {
    const GenPaths p = gen_paths(dir);
    Json params = to_json(run.spec);
    params["seed"] = run.seed;
    return run_cached("gen", {{"params", params}, {"meta", meta.fields}}, {},
                      {p.source, p.target, p.ground_truth, p.landmarks}, cache, [&] {
                          const SyntheticData d = gen_synthetic(run.spec, run.seed);
                          save(d.source, p.source, meta);
                          save(d.target, p.target, meta);
                          save(d.ground_truth, p.ground_truth, meta);
                          write_json(p.landmarks, meta.with(to_json(d.landmarks)));
                      });
}

StageOutcome map_file(const fs::path& in, const fs::path& out, const fs::path& trace, const ConformalOptions& options,
                      const std::optional<fs::path>& align_to, const std::optional<fs::path>& landmarks,
                      const ArtifactMeta& meta, bool cache) {
    if (align_to.has_value() != landmarks.has_value()) {
        throw ConfigError("alignment needs both a reference mapped mesh and a landmark file");
    }
    std::vector<fs::path> inputs{in};
    if (align_to) {
        inputs.push_back(*align_to);
        inputs.push_back(*landmarks);
    }
    return run_cached("map", {{"conformal", to_json(options)}, {"meta", meta.fields}}, inputs, {out, trace}, cache,
                      [&] {
                          SphericalMesh sm = map_stage(load_mesh(in), options);
                          Json tr = energy_trace_json(sm);
                          if (align_to) {
                              const SphericalMesh ref = load_mapped(*align_to);
                              const Eigen::Matrix3d r = align_spheres(ref, sm, landmarks_from_json(read_json(*landmarks)));
                              Json rows = Json::array();
                              for (int i = 0; i < 3; ++i) rows.push_back({r(i, 0), r(i, 1), r(i, 2)});
                              tr["alignment"] = rows;
                          }
                          save(with_sphere_channel(sm), out, meta);
                          write_json(trace, meta.with(tr));
                      });
}

StageOutcome extract_file(const fs::path& in, const fs::path& out, bool appearance, const ArtifactMeta& meta,
                          bool cache) {
    return run_cached("extract", {{"appearance", appearance}, {"meta", meta.fields}}, {in}, {out}, cache, [&] {
        Mesh m = load_mesh(in);
        extract_stage(m, appearance);
        save(m, out, meta);
    });
}

StageOutcome segment_file(const fs::path& in, const fs::path& out, const fs::path& manifest,
                          const PrefilterOptions& prefilter, const SegmentOptions& segment, const ArtifactMeta& meta,
                          bool cache) {
    const Json params = {{"prefilter", to_json(prefilter)}, {"segment", to_json(segment)}, {"meta", meta.fields}};
    return run_cached("segment", params, {in}, {out, manifest}, cache, [&] {
        Mesh m = load_mesh(in);
        const PatchSet set = segment_stage(m, prefilter, segment);
        save(m, out, meta);
        write_json(manifest, meta.with(to_json(set)));
    });
}

StageOutcome fit_file(const fs::path& mesh, const fs::path& manifest, const fs::path& out, const std::string& role,
                      int order, const FitOptions& options, const ArtifactMeta& meta, bool cache) {
    const std::vector<Property> props = role_properties(role);
    if (order < 1) throw ConfigError("order must be at least 1");
    const Json params = {{"role", role}, {"order", order}, {"fit", to_json(options)}, {"meta", meta.fields}};
    return run_cached("fit", params, {mesh, manifest}, {out}, cache, [&] {
        const SphericalMesh sm = load_mapped(mesh);
        const PatchSet set = patch_set_from_json(read_json(manifest), sm.base);
        write_json(out, meta.with(to_json(fit_stage(sm, set, props, order, options))));
    });
}

StageOutcome match_file(const SideFiles& src, const SideFiles& tar, const fs::path& out, const MatchWeights& weights,
                        bool normalize, const ArtifactMeta& meta, bool cache) {
    const Json params = {{"weights", to_json(weights)}, {"normalize", normalize}, {"meta", meta.fields}};
    return run_cached("match", params, {src.mesh, src.manifest, src.pdfs, tar.mesh, tar.manifest, tar.pdfs}, {out},
                      cache, [&] {
                          const Side s = load_side(src, true);
                          const Side t = load_side(tar, true);
                          const MatchResult r = match_stage(s.sm.base, s.patches, s.pdfs, t.sm.base, t.patches,
                                                            t.pdfs, weights, normalize);
                          write_json(out, meta.with(to_json(r)));
                      });
}

StageOutcome transfer_file(const SideFiles& src, const SideFiles& tar, const fs::path& matches, const fs::path& out,
                           const fs::path& maps, const TransferOptions& options, const ArtifactMeta& meta,
                           bool cache) {
    options.validate();
    const Json params = {{"order", options.order},
                         {"assign", to_json(options.assign)},
                         {"fit", to_json(options.fit)},
                         {"meta", meta.fields}};
    return run_cached("transfer", params, {src.mesh, src.manifest, tar.mesh, tar.manifest, matches}, {out, maps},
                      cache, [&] {
                          const Side s = load_side(src, false);
                          const Side t = load_side(tar, false);
                          const MatchResult m = match_result_from_json(read_json(matches));
                          for (const auto& e : m.matches) {
                              if (e.tar_id < 0 || e.tar_id > t.patches.foreground_count() || e.src_id < 0 ||
                                  e.src_id > s.patches.foreground_count()) {
                                  throw InvalidArgument("match manifest refers to patches that do not exist");
                              }
                          }
                          const TransferResult r = transfer_stage(s.sm, s.patches, t.sm, t.patches, m, options);
                          SphericalMesh rec = t.sm;
                          rec.base = r.result;
                          save(inverse_map(rec), out, meta, channel::kColor);
                          write_json(maps, meta.with(patch_maps_json(r)));
                      });
}

StageOutcome eval_file(const fs::path& result, const fs::path& ground_truth, const fs::path& out,
                       const ArtifactMeta& meta, bool cache) {
    return run_cached("eval", {{"meta", meta.fields}}, {result, ground_truth}, {out}, cache, [&] {
        const EvalReport r = evaluate(load_mesh(result), load_mesh(ground_truth));
        write_json(out, meta.with(to_json(r)));
    });
}

std::vector<fs::path> render_files(const RenderInputs& in, const fs::path& out_dir) {
    std::vector<fs::path> written;
    make_dirs(out_dir);
    if (in.mesh) {
        const Mesh m = load_mesh(*in.mesh);
        const std::string stem = in.mesh->stem().string();
        for (const auto& [name, values] : m.scalars()) {
            Mesh view;
            view.vertices = m.vertices;
            view.faces = m.faces;
            std::vector<Vec3> rgb(values.size());
            const std::vector<double> t = normalized(values);
            for (std::size_t i = 0; i < t.size(); ++i) {
                std::uint8_t r, g, b;
                colormap(t[i], r, g, b);
                rgb[i] = Vec3(r, g, b) / 255.0;
            }
            view.set_scalar(name, values);
            view.set_vector("display", std::move(rgb));
            const fs::path p = out_dir / (stem + "." + name + ".ply");
            SaveOptions o;
            o.rgb_channel = "display";
            save_mesh(view, p, o);
            written.push_back(p);
        }
    }
    if (in.energy_trace) {
        const Json j = read_json(*in.energy_trace);
        const auto energy = j.at("energy").get<std::vector<double>>();
        const fs::path p = out_dir / (in.energy_trace->stem().string() + ".png");
        write_png(p, line_plot(energy, true));
        written.push_back(p);
    }
    if (in.matches) {
        const MatchResult r = match_result_from_json(read_json(*in.matches));
        if (!r.total.empty()) {
            const fs::path p = out_dir / "costs.png";
            write_png(p, heatmap(r.total));
            written.push_back(p);
        }
    }
    if (in.result && in.ground_truth) {
        const Mesh rec = load_mesh(*in.result);
        const Mesh gt = load_mesh(*in.ground_truth);
        evaluate(rec, gt);  // same checks and messages as eval
        const auto& h = rec.scalar(channel::kHue);
        const auto& s = rec.scalar(channel::kSaturation);
        const auto& hg = gt.scalar(channel::kHue);
        const auto& sg = gt.scalar(channel::kSaturation);
        std::vector<double> eh(h.size()), es(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) {
            eh[i] = hue_distance(h[i], hg[i]);
            es[i] = std::abs(s[i] - sg[i]);
        }
        const fs::path ph = out_dir / "error_hue.png", ps = out_dir / "error_sat.png";
        write_png(ph, histogram(eh, 50, 0.0, 0.5));
        write_png(ps, histogram(es, 50, 0.0, 1.0));
        written.push_back(ph);
        written.push_back(ps);
    }
    return written;
}

RunSummary run_all(const PipelineConfig& config, std::ostream& log) {
    config.validate();
    const fs::path dir = config.out_dir;
    make_dirs(dir);

    Json echo = to_json(config);
    echo.erase("out_dir");
    echo.erase("cache");
    // Intermediate artifacts carry only what affects them, so a config edit
    // reruns just the stages downstream of it. Final outputs get the full echo.
    ArtifactMeta meta;
    meta.fields = {{"version", kVersion}, {"seed", config.synthetic ? Json(config.synthetic->seed) : Json(nullptr)}};
    ArtifactMeta final_meta = meta;
    final_meta.fields["config_hash"] = config_hash(config);
    final_meta.fields["config"] = echo;
    const bool cache = config.cache;

    RunSummary summary;
    auto note = [&](StageOutcome o, const std::string& what) {
        log << o.stage << " " << what << (o.cache_hit ? ": cache hit" : ": done") << '\n';
        summary.stages.push_back(std::move(o));
    };

    fs::path source = config.source, target = config.target, gt = config.ground_truth, landmarks = config.landmarks;
    if (config.synthetic) {
        note(gen_file(*config.synthetic, dir / "gen", meta, cache), "synthetic data");
        const GenPaths p = gen_paths(dir / "gen");
        source = p.source;
        target = p.target;
        gt = p.ground_truth;
        if (config.synthetic->spec.landmarks > 0 && landmarks.empty()) landmarks = p.landmarks;
    }

    const TransferOptions& t = config.transfer;
    const std::optional<fs::path> lm = landmarks.empty() ? std::nullopt : std::optional<fs::path>(landmarks);
    note(map_file(source, dir / "source.map.ply", dir / "source.energy.json", t.conformal, {}, {}, meta, cache),
         "source");
    note(map_file(target, dir / "target.map.ply", dir / "target.energy.json", t.conformal,
                  lm ? std::optional<fs::path>(dir / "source.map.ply") : std::nullopt, lm, meta, cache),
         "target");
    note(extract_file(dir / "source.map.ply", dir / "source.ext.ply", true, meta, cache), "source");
    note(extract_file(dir / "target.map.ply", dir / "target.ext.ply", false, meta, cache), "target");
    note(segment_file(dir / "source.ext.ply", dir / "source.seg.ply", dir / "source.patches.json", t.prefilter,
                      t.segment, meta, cache),
         "source");
    note(segment_file(dir / "target.ext.ply", dir / "target.seg.ply", dir / "target.patches.json", t.prefilter,
                      t.segment, meta, cache),
         "target");
    const SideFiles src{dir / "source.seg.ply", dir / "source.patches.json", dir / "source.pdfs.json"};
    const SideFiles tar{dir / "target.seg.ply", dir / "target.patches.json", dir / "target.pdfs.json"};
    note(fit_file(src.mesh, src.manifest, src.pdfs, "source", t.order, t.fit, meta, cache), "source");
    note(fit_file(tar.mesh, tar.manifest, tar.pdfs, "target", t.order, t.fit, meta, cache), "target");
    note(match_file(src, tar, dir / "matches.json", t.weights, t.normalize_costs, meta, cache), "patches");
    summary.result = dir / "result.ply";
    note(transfer_file(src, tar, dir / "matches.json", summary.result, dir / "maps.json", t, final_meta, cache),
         "maps");

    RenderInputs render;
    render.energy_trace = dir / "target.energy.json";
    render.matches = dir / "matches.json";
    if (!gt.empty()) {
        summary.report_path = dir / "report.json";
        note(eval_file(summary.result, gt, summary.report_path, final_meta, cache), "report");
        summary.report = eval_report_from_json(read_json(summary.report_path));
        render.result = summary.result;
        render.ground_truth = gt;
    }
    const auto plots = render_files(render, dir / "plots");
    log << "render: " << plots.size() << " files\n";
    return summary;
}

}  // namespace stylexfer
