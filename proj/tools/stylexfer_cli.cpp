// stylexfer: command-line front end for the material style transfer pipeline.
//
// Every subcommand reads and writes files and caches its outputs by content
// hash (see --no-cache). Exit status: 0 ok, 2 config, 3 IO, 4 stage failure.

#include "stylexfer/config.hpp"
#include "stylexfer/error.hpp"
#include "stylexfer/hashing.hpp"
#include "stylexfer/stages.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace sx = stylexfer;
namespace fs = std::filesystem;
using sx::Json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitStage = 4;

void report(const sx::StageOutcome& o, const std::vector<fs::path>& outputs) {
    std::cout << o.stage << ": " << (o.cache_hit ? "cache hit" : "done") << '\n';
    for (const auto& p : outputs) std::cout << "  " << p.string() << " sha256 " << sx::sha256_file(p) << '\n';
}

sx::MatchWeights parse_weights(const std::string& preset, const std::vector<double>& w) {
    if (!preset.empty() && !w.empty()) throw sx::ConfigError("give either --preset or --weights, not both");
    if (!preset.empty()) return sx::MatchWeights::preset(preset);
    sx::MatchWeights out;
    if (!w.empty()) {
        if (w.size() != 5) throw sx::ConfigError("--weights needs five values");
        out = {w[0], w[1], w[2], w[3], w[4]};
    }
    out.normalized();  // validates
    return out;
}

fs::path sibling(const std::string& path, const std::string& suffix) {
    const fs::path p(path);
    fs::path out = p.parent_path() / p.stem();
    out += suffix;
    return out;
}

sx::FitOptions fit_options(double reg, const std::string& outside) {
    sx::FitOptions o;
    o.regularization = reg;
    o.outside = outside == "drop" ? sx::OutsideMask::kDrop : sx::OutsideMask::kZero;
    if (!(reg >= 0)) throw sx::ConfigError("--reg must be non-negative");
    return o;
}

struct SideArgs {
    std::string mesh, patches, pdfs;
    sx::SideFiles files() const { return {mesh, patches, pdfs}; }
};

void add_side(CLI::App* app, const std::string& name, SideArgs& side, bool pdfs) {
    app->add_option("--" + name + "-mesh", side.mesh, "Segmented " + name + " mesh")->required();
    app->add_option("--" + name + "-patches", side.patches, name + " patch manifest")->required();
    if (pdfs) app->add_option("--" + name + "-pdfs", side.pdfs, name + " PDF file")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Material style transfer between fluorescent 3-D objects"};
    app.require_subcommand(1);
    bool no_cache = false;
    app.add_flag("--no-cache", no_cache, "Always recompute");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic source/target/ground-truth triple");
    std::string gen_config, gen_out = "gen";
    sx::SyntheticRun gen_run;
    gen->add_option("--config", gen_config, "Pipeline config whose 'synthetic' block is used");
    gen->add_option("--out-dir", gen_out, "Output directory");
    gen->add_option("--seed", gen_run.seed, "RNG seed");
    gen->add_option("--spots", gen_run.spec.spots, "Spot count K");
    gen->add_option("--shape", gen_run.spec.shape, "sphere | egg | ellipsoid");
    gen->add_option("--level", gen_run.spec.level, "Subdivision level");
    gen->add_option("--rotation", gen_run.spec.rotation_deg, "Rotation of the target spots (degrees)");
    gen->add_option("--contrast", gen_run.spec.contrast, "Spot concentration contrast");
    gen->add_option("--target-scale", gen_run.spec.target_concentration_scale, "Target concentration scale");
    gen->add_option("--noise", gen_run.spec.noise, "Concentration noise sigma");
    gen->add_flag("--band-limited", gen_run.spec.band_limited, "Smooth band-limited fields instead of spots");

    // map
    auto* map = app.add_subcommand("map", "Conformal map to the unit sphere");
    std::string map_in, map_out, map_trace, map_align, map_landmarks;
    sx::ConformalOptions conformal;
    map->add_option("--in", map_in, "Input mesh (PLY or OBJ)")->required();
    map->add_option("--out", map_out, "Output PLY carrying the sphere channel")->required();
    map->add_option("--trace", map_trace, "Energy trace JSON (default <out stem>.energy.json)");
    map->add_option("--max-iters", conformal.max_iters);
    map->add_option("--energy-tol", conformal.energy_tol);
    map->add_option("--step", conformal.step_size);
    map->add_option("--align-to", map_align, "Mapped reference mesh for landmark alignment");
    map->add_option("--landmarks", map_landmarks, "Landmark JSON");

    // extract
    auto* extract = app.add_subcommand("extract", "Composition, concentration, value and curvature channels");
    std::string ex_in, ex_out;
    bool ex_appearance = false;
    extract->add_option("--in", ex_in)->required();
    extract->add_option("--out", ex_out)->required();
    extract->add_flag("--appearance", ex_appearance, "Source side: hue and saturation are required");

    // segment
    auto* segment = app.add_subcommand("segment", "Prefilter concentration and segment into patches");
    std::string seg_in, seg_out, seg_manifest;
    sx::PrefilterOptions prefilter;
    sx::SegmentOptions seg_opts;
    std::optional<double> seg_k;
    segment->add_option("--in", seg_in)->required();
    segment->add_option("--out", seg_out)->required();
    segment->add_option("--manifest", seg_manifest, "Patch manifest (default <out stem>.patches.json)");
    segment->add_option("--k", seg_k, "Graph segmentation scale (default from the value range)");
    segment->add_option("--min-size", seg_opts.min_size, "Smallest patch, in faces");
    segment->add_option("--sigma-s", prefilter.sigma_s, "Bilateral spatial sigma, in edge lengths");
    segment->add_option("--sigma-r", prefilter.sigma_r, "Bilateral range sigma");
    segment->add_option("--diffusion-iters", prefilter.diffusion_iters);
    segment->add_option("--white-thresh", prefilter.white_thresh);

    // fit
    auto* fit = app.add_subcommand("fit", "Per-patch spherical harmonic PDFs");
    std::string fit_mesh, fit_patches, fit_out, fit_role = "source", fit_outside = "zero";
    int fit_order = 16;
    double fit_reg = 1e-8;
    fit->add_option("--mesh", fit_mesh)->required();
    fit->add_option("--patches", fit_patches)->required();
    fit->add_option("--out", fit_out)->required();
    fit->add_option("--role", fit_role, "source | target")->check(CLI::IsMember({"source", "target"}));
    fit->add_option("--order", fit_order, "Highest SH band");
    fit->add_option("--reg", fit_reg, "Tikhonov regularization");
    fit->add_option("--outside", fit_outside, "zero | drop")->check(CLI::IsMember({"zero", "drop"}));

    // match
    auto* match = app.add_subcommand("match", "Match target patches to source patches");
    SideArgs m_src, m_tar;
    std::string m_out, m_preset;
    std::vector<double> m_weights;
    bool m_raw_costs = false;
    add_side(match, "src", m_src, true);
    add_side(match, "tar", m_tar, true);
    match->add_option("--out", m_out, "Match manifest JSON")->required();
    match->add_option("--preset", m_preset, "Weight preset")->check(CLI::IsMember(sx::MatchWeights::preset_names()));
    match->add_option("--weights", m_weights, "alpha beta gamma delta lambda")->expected(5);
    match->add_flag("--raw-costs", m_raw_costs, "Weight raw costs without min-max normalization");

    // transfer
    auto* transfer = app.add_subcommand("transfer", "Material maps, reconstruction and blending");
    SideArgs t_src, t_tar;
    std::string t_matches, t_out, t_maps, t_outside = "zero";
    sx::TransferOptions t_opts;
    double t_reg = 1e-8;
    add_side(transfer, "src", t_src, false);
    add_side(transfer, "tar", t_tar, false);
    transfer->add_option("--matches", t_matches)->required();
    transfer->add_option("--out", t_out, "Result PLY")->required();
    transfer->add_option("--maps", t_maps, "Per-patch map JSON (default <out stem>.maps.json)");
    transfer->add_option("--order", t_opts.order);
    transfer->add_option("--reg", t_reg);
    transfer->add_option("--outside", t_outside)->check(CLI::IsMember({"zero", "drop"}));
    transfer->add_option("--mu-s", t_opts.assign.mu_s, "Saturation scale");
    transfer->add_option("--f-s", t_opts.assign.f_s, "Saturation frequency parameter");
    transfer->add_option("--mu-h", t_opts.assign.mu_h, "Hue scale");
    transfer->add_option("--blend-sigma", t_opts.assign.blend_sigma, "Blend radius, in mean sphere edge lengths");
    transfer->add_flag("--raw-sigma", t_opts.assign.raw_sigma, "Unnormalized frequency weights");

    // eval
    auto* eval = app.add_subcommand("eval", "Per-vertex hue and saturation accuracy");
    std::string e_result, e_gt, e_out;
    eval->add_option("--result", e_result)->required();
    eval->add_option("--gt", e_gt, "Ground truth mesh")->required();
    eval->add_option("--out", e_out, "Report JSON")->required();

    // render
    auto* render = app.add_subcommand("render", "False-color PLYs and PNG plots");
    std::string r_mesh, r_trace, r_matches, r_result, r_gt, r_out = "render";
    render->add_option("--mesh", r_mesh, "Mesh whose scalar channels are rendered");
    render->add_option("--trace", r_trace, "Energy trace JSON");
    render->add_option("--matches", r_matches, "Match manifest JSON");
    render->add_option("--result", r_result, "Result mesh (with --gt: error histograms)");
    render->add_option("--gt", r_gt, "Ground truth mesh");
    render->add_option("--out-dir", r_out);

    // run-all
    auto* run = app.add_subcommand("run-all", "Run every stage from a config file");
    std::string run_config, run_out;
    run->add_option("--config", run_config, "Pipeline config JSON")->required();
    run->add_option("--out-dir", run_out, "Override the config's out_dir");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const bool cache = !no_cache;
    try {
        if (*gen) {
            if (!gen_config.empty()) {
                const sx::PipelineConfig c = sx::load_config(gen_config);
                if (!c.synthetic) throw sx::ConfigError(gen_config + " has no 'synthetic' block");
                gen_run = *c.synthetic;
            }
            gen_run.spec.validate();
            Json params = sx::to_json(gen_run.spec);
            params["seed"] = gen_run.seed;
            const auto o = sx::gen_file(gen_run, gen_out, sx::make_meta("gen", params), cache);
            const auto p = sx::gen_paths(gen_out);
            report(o, {p.source, p.target, p.ground_truth, p.landmarks});
        } else if (*map) {
            const fs::path trace = map_trace.empty() ? sibling(map_out, ".energy.json") : fs::path(map_trace);
            std::optional<fs::path> align, lm;
            if (!map_align.empty()) align = map_align;
            if (!map_landmarks.empty()) lm = map_landmarks;
            const Json params = {{"conformal", sx::to_json(conformal)}, {"aligned", align.has_value()}};
            report(sx::map_file(map_in, map_out, trace, conformal, align, lm, sx::make_meta("map", params), cache),
                   {map_out, trace});
        } else if (*extract) {
            const Json params = {{"appearance", ex_appearance}};
            report(sx::extract_file(ex_in, ex_out, ex_appearance, sx::make_meta("extract", params), cache), {ex_out});
        } else if (*segment) {
            seg_opts.k = seg_k;
            const fs::path manifest = seg_manifest.empty() ? sibling(seg_out, ".patches.json") : fs::path(seg_manifest);
            const Json params = {{"prefilter", sx::to_json(prefilter)}, {"segment", sx::to_json(seg_opts)}};
            report(sx::segment_file(seg_in, seg_out, manifest, prefilter, seg_opts, sx::make_meta("segment", params),
                                    cache),
                   {seg_out, manifest});
        } else if (*fit) {
            const sx::FitOptions o = fit_options(fit_reg, fit_outside);
            const Json params = {{"role", fit_role}, {"order", fit_order}, {"fit", sx::to_json(o)}};
            report(sx::fit_file(fit_mesh, fit_patches, fit_out, fit_role, fit_order, o, sx::make_meta("fit", params),
                                cache),
                   {fit_out});
        } else if (*match) {
            const sx::MatchWeights w = parse_weights(m_preset, m_weights);
            const Json params = {{"weights", sx::to_json(w)}, {"normalize", !m_raw_costs}};
            report(sx::match_file(m_src.files(), m_tar.files(), m_out, w, !m_raw_costs,
                                  sx::make_meta("match", params), cache),
                   {m_out});
        } else if (*transfer) {
            t_opts.fit = fit_options(t_reg, t_outside);
            t_opts.validate();
            const fs::path maps = t_maps.empty() ? sibling(t_out, ".maps.json") : fs::path(t_maps);
            const Json params = {{"order", t_opts.order}, {"assign", sx::to_json(t_opts.assign)},
                                 {"fit", sx::to_json(t_opts.fit)}};
            report(sx::transfer_file(t_src.files(), t_tar.files(), t_matches, t_out, maps, t_opts,
                                     sx::make_meta("transfer", params), cache),
                   {t_out, maps});
        } else if (*eval) {
            const auto o = sx::eval_file(e_result, e_gt, e_out, sx::make_meta("eval", Json::object()), cache);
            report(o, {e_out});
            const sx::EvalReport r = sx::eval_report_from_json(sx::read_json(e_out));
            std::cout << "accuracy hue " << r.accuracy_hue << " saturation " << r.accuracy_sat << '\n';
        } else if (*render) {
            sx::RenderInputs in;
            if (!r_mesh.empty()) in.mesh = r_mesh;
            if (!r_trace.empty()) in.energy_trace = r_trace;
            if (!r_matches.empty()) in.matches = r_matches;
            if (!r_result.empty()) in.result = r_result;
            if (!r_gt.empty()) in.ground_truth = r_gt;
            if (in.result.has_value() != in.ground_truth.has_value()) {
                throw sx::ConfigError("--result and --gt go together");
            }
            for (const auto& p : sx::render_files(in, r_out)) std::cout << p.string() << '\n';
        } else if (*run) {
            sx::PipelineConfig c = sx::load_config(run_config);
            if (!run_out.empty()) c.out_dir = run_out;
            if (no_cache) c.cache = false;
            const sx::RunSummary s = sx::run_all(c, std::cout);
            std::cout << "result " << s.result.string() << '\n';
            if (s.report) {
                std::cout << "report " << s.report_path.string() << '\n';
                std::cout << "accuracy hue " << s.report->accuracy_hue << " saturation " << s.report->accuracy_sat
                          << '\n';
            }
        }
    } catch (const sx::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sx::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const sx::ParseError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "stage failure: " << e.what() << '\n';
        return kExitStage;
    }
    return 0;
}
