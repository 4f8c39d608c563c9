#include "stylexfer/config.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/hashing.hpp"

#include <cmath>
#include <set>

namespace stylexfer {

namespace {

// Reads fields from one JSON object and rejects keys nobody asked for.
class Reader {
public:
    Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    const Json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
        }
    }

private:
    const Json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    if (path.is_absolute() || base.empty()) return path;
    return base / path;
}

Vec3 vec3_of(const std::vector<double>& v, const std::string& where) {
    if (v.size() != 3) throw ConfigError(where + ": expected 3 numbers");
    return {v[0], v[1], v[2]};
}

}  // namespace

void PipelineConfig::validate() const {
    transfer.validate();
    if (!synthetic && (source.empty() || target.empty())) {
        throw ConfigError("config needs 'source' and 'target' paths or a 'synthetic' block");
    }
    if (synthetic) synthetic->spec.validate();
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
    const MatchWeights& w = transfer.weights;
    for (double x : {w.alpha, w.beta, w.gamma, w.delta, w.lambda}) {
        if (!std::isfinite(x)) throw ConfigError("match weights must be finite");
    }
}

Json to_json(const SyntheticSpec& s) {
    Json spots = Json::array();
    for (const auto& p : s.explicit_spots) {
        spots.push_back({{"center", {p.center.x(), p.center.y(), p.center.z()}},
                         {"radius", p.radius},
                         {"elongation", p.elongation},
                         {"orientation", p.orientation},
                         {"composition", p.composition},
                         {"concentration", p.concentration},
                         {"relation_scale", p.relation_scale}});
    }
    return {{"shape", s.shape},
            {"a", s.a},
            {"b", s.b},
            {"c", s.c},
            {"taper", s.taper},
            {"level", s.level},
            {"spots", s.spots},
            {"radius_min", s.radius_min},
            {"radius_max", s.radius_max},
            {"contrast", s.contrast},
            {"background_concentration", s.background_concentration},
            {"background_composition", s.background_composition},
            {"background_relation", s.background_relation},
            {"relation_min", s.relation_min},
            {"relation_max", s.relation_max},
            {"relation_offset", s.relation_offset},
            {"hue_offset", s.hue_offset},
            {"ramp_edges", s.ramp_edges},
            {"separation_edges", s.separation_edges},
            {"bispectral_saturation", s.bispectral_saturation},
            {"noise", s.noise},
            {"target_concentration_scale", s.target_concentration_scale},
            {"rotation_deg", s.rotation_deg},
            {"rotation_axis", {s.rotation_axis.x(), s.rotation_axis.y(), s.rotation_axis.z()}},
            {"landmarks", s.landmarks},
            {"band_limited", s.band_limited},
            {"explicit_spots", spots}};
}

SyntheticSpec synthetic_spec_from_json(const Json& j) {
    SyntheticSpec s;
    Reader r(j, "synthetic");
    r.get("shape", s.shape);
    r.get("a", s.a);
    r.get("b", s.b);
    r.get("c", s.c);
    r.get("taper", s.taper);
    r.get("level", s.level);
    r.get("spots", s.spots);
    r.get("radius_min", s.radius_min);
    r.get("radius_max", s.radius_max);
    r.get("contrast", s.contrast);
    r.get("background_concentration", s.background_concentration);
    r.get("background_composition", s.background_composition);
    r.get("background_relation", s.background_relation);
    r.get("relation_min", s.relation_min);
    r.get("relation_max", s.relation_max);
    r.get("relation_offset", s.relation_offset);
    r.get("hue_offset", s.hue_offset);
    r.get("ramp_edges", s.ramp_edges);
    r.get("separation_edges", s.separation_edges);
    r.get("bispectral_saturation", s.bispectral_saturation);
    r.get("noise", s.noise);
    r.get("target_concentration_scale", s.target_concentration_scale);
    r.get("rotation_deg", s.rotation_deg);
    std::vector<double> axis{s.rotation_axis.x(), s.rotation_axis.y(), s.rotation_axis.z()};
    r.get("rotation_axis", axis);
    s.rotation_axis = vec3_of(axis, "synthetic.rotation_axis");
    r.get("landmarks", s.landmarks);
    r.get("band_limited", s.band_limited);
    if (const Json* spots = r.sub("explicit_spots")) {
        if (!spots->is_array()) throw ConfigError("synthetic.explicit_spots: expected an array");
        for (const auto& js : *spots) {
            SpotSpec p;
            Reader sr(js, "synthetic.explicit_spots[]");
            std::vector<double> c{p.center.x(), p.center.y(), p.center.z()};
            sr.get("center", c);
            p.center = vec3_of(c, "explicit_spots.center");
            sr.get("radius", p.radius);
            sr.get("elongation", p.elongation);
            sr.get("orientation", p.orientation);
            sr.get("composition", p.composition);
            sr.get("concentration", p.concentration);
            sr.get("relation_scale", p.relation_scale);
            sr.finish();
            s.explicit_spots.push_back(p);
        }
    }
    r.sub("seed");  // read by the caller
    r.finish();
    try {
        s.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return s;
}

Json to_json(const AssignParams& p) {
    return {{"mu_s", p.mu_s},
            {"f_s", p.f_s},
            {"mu_h", p.mu_h},
            {"blend_sigma", p.blend_sigma},
            {"raw_sigma", p.raw_sigma}};
}

Json to_json(const PrefilterOptions& p) {
    return {{"sigma_s", p.sigma_s},
            {"sigma_r", p.sigma_r},
            {"diffusion_iters", p.diffusion_iters},
            {"white_thresh", p.white_thresh}};
}

Json to_json(const SegmentOptions& p) {
    return {{"k", p.k ? Json(*p.k) : Json(nullptr)}, {"min_size", p.min_size}};
}

Json to_json(const ConformalOptions& p) {
    return {{"max_iters", p.max_iters}, {"energy_tol", p.energy_tol}, {"step_size", p.step_size}};
}

Json to_json(const FitOptions& p) {
    return {{"regularization", p.regularization},
            {"outside", p.outside == OutsideMask::kZero ? "zero" : "drop"},
            {"solver", p.solver == FitSolver::kNormalEquations ? "normal" : "qr"}};
}

Json to_json(const PipelineConfig& c) {
    const TransferOptions& t = c.transfer;
    Json j = {{"source", c.source.generic_string()},
              {"target", c.target.generic_string()},
              {"ground_truth", c.ground_truth.generic_string()},
              {"landmarks", c.landmarks.generic_string()},
              {"out_dir", c.out_dir.generic_string()},
              {"order", t.order},
              {"preset", c.preset},
              {"weights", to_json(t.weights)},
              {"normalize_costs", t.normalize_costs},
              {"assign", to_json(t.assign)},
              {"prefilter", to_json(t.prefilter)},
              {"segment", to_json(t.segment)},
              {"conformal", to_json(t.conformal)},
              {"fit", to_json(t.fit)},
              {"cache", c.cache}};
    if (c.synthetic) {
        Json s = to_json(c.synthetic->spec);
        s["seed"] = c.synthetic->seed;
        j["synthetic"] = s;
    } else {
        j["synthetic"] = nullptr;
    }
    return j;
}

PipelineConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    PipelineConfig c;
    Reader r(j, "config");
    std::string source, target, gt, landmarks, out_dir = "out";
    r.get("source", source);
    r.get("target", target);
    r.get("ground_truth", gt);
    r.get("landmarks", landmarks);
    r.get("out_dir", out_dir);
    c.source = resolve(source, base_dir);
    c.target = resolve(target, base_dir);
    c.ground_truth = resolve(gt, base_dir);
    c.landmarks = resolve(landmarks, base_dir);
    c.out_dir = resolve(out_dir, base_dir);

    if (const Json* s = r.sub("synthetic"); s && !s->is_null()) {
        SyntheticRun run;
        run.spec = synthetic_spec_from_json(*s);
        if (s->contains("seed")) {
            try {
                run.seed = s->at("seed").get<std::uint64_t>();
            } catch (const nlohmann::json::exception&) {
                throw ConfigError("synthetic.seed: expected a non-negative integer");
            }
        }
        c.synthetic = run;
    }

    TransferOptions& t = c.transfer;
    r.get("order", t.order);
    r.get("preset", c.preset);
    const Json* weights = r.sub("weights");
    if (!c.preset.empty() && weights && !weights->is_null()) {
        // The echo written by to_json carries both; the preset wins only if they agree.
        const MatchWeights p = MatchWeights::preset(c.preset);
        const MatchWeights w = weights_from_json(*weights);
        if (std::abs(p.alpha - w.alpha) + std::abs(p.beta - w.beta) + std::abs(p.gamma - w.gamma) +
                std::abs(p.delta - w.delta) + std::abs(p.lambda - w.lambda) > 1e-12) {
            throw ConfigError("both 'preset' and different explicit 'weights' given");
        }
    }
    if (!c.preset.empty()) {
        t.weights = MatchWeights::preset(c.preset);
    } else if (weights && !weights->is_null()) {
        Reader wr(*weights, "weights");
        wr.get("alpha", t.weights.alpha);
        wr.get("beta", t.weights.beta);
        wr.get("gamma", t.weights.gamma);
        wr.get("delta", t.weights.delta);
        wr.get("lambda", t.weights.lambda);
        wr.finish();
    }
    r.get("normalize_costs", t.normalize_costs);

    if (const Json* a = r.sub("assign")) {
        Reader ar(*a, "assign");
        ar.get("mu_s", t.assign.mu_s);
        ar.get("f_s", t.assign.f_s);
        ar.get("mu_h", t.assign.mu_h);
        ar.get("blend_sigma", t.assign.blend_sigma);
        ar.get("raw_sigma", t.assign.raw_sigma);
        ar.finish();
    }
    if (const Json* p = r.sub("prefilter")) {
        Reader pr(*p, "prefilter");
        pr.get("sigma_s", t.prefilter.sigma_s);
        pr.get("sigma_r", t.prefilter.sigma_r);
        pr.get("diffusion_iters", t.prefilter.diffusion_iters);
        pr.get("white_thresh", t.prefilter.white_thresh);
        pr.finish();
    }
    if (const Json* s = r.sub("segment")) {
        Reader sr(*s, "segment");
        if (const Json* k = sr.sub("k"); k && !k->is_null()) {
            if (!k->is_number()) throw ConfigError("segment.k: expected a number or null");
            t.segment.k = k->get<double>();
        }
        sr.get("min_size", t.segment.min_size);
        sr.finish();
    }
    if (const Json* m = r.sub("conformal")) {
        Reader mr(*m, "conformal");
        mr.get("max_iters", t.conformal.max_iters);
        mr.get("energy_tol", t.conformal.energy_tol);
        mr.get("step_size", t.conformal.step_size);
        mr.finish();
    }
    if (const Json* f = r.sub("fit")) {
        Reader fr(*f, "fit");
        fr.get("regularization", t.fit.regularization);
        std::string outside = "zero", solver = "normal";
        fr.get("outside", outside);
        fr.get("solver", solver);
        fr.finish();
        if (outside == "zero") t.fit.outside = OutsideMask::kZero;
        else if (outside == "drop") t.fit.outside = OutsideMask::kDrop;
        else throw ConfigError("fit.outside must be 'zero' or 'drop'");
        if (solver == "normal") t.fit.solver = FitSolver::kNormalEquations;
        else if (solver == "qr") t.fit.solver = FitSolver::kOrthogonal;
        else throw ConfigError("fit.solver must be 'normal' or 'qr'");
    }
    r.get("cache", c.cache);
    r.finish();
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    Json j;
    try {
        j = read_json(path);
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    return config_from_json(j, path.parent_path());
}

std::string config_hash(const PipelineConfig& config) {
    // Where results go and whether the cache is used do not change them.
    Json j = to_json(config);
    j.erase("out_dir");
    j.erase("cache");
    return sha256_hex(j.dump());
}

}  // namespace stylexfer
