#include "stylexfer/serialization.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/fsutil.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace stylexfer {

namespace {

constexpr char kPdfMagic[6] = {'S', 'X', 'P', 'D', 'F', '1'};

template <class T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad field '") + key + "': " + e.what());
    }
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json data = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
    const auto rows = field<Eigen::Index>(j, "rows");
    const auto cols = field<Eigen::Index>(j, "cols");
    const auto data = field<std::vector<double>>(j, "data");
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
        throw ParseError("matrix data length does not match its shape");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
    }
    return m;
}

Property property_field(const Json& j, const char* key) {
    const auto name = field<std::string>(j, key);
    try {
        return parse_property(name);
    } catch (const Error&) {
        throw ParseError("unknown property '" + name + "'");
    }
}

Json costs_json(const CostTerms& c) {
    return {{"shape", c.shape},
            {"area", c.area},
            {"curvature", c.curvature},
            {"composition", c.composition},
            {"concentration", c.concentration}};
}

CostTerms costs_from_json(const Json& j) {
    CostTerms c;
    c.shape = field<double>(j, "shape");
    c.area = field<double>(j, "area");
    c.curvature = field<double>(j, "curvature");
    c.composition = field<double>(j, "composition");
    c.concentration = field<double>(j, "concentration");
    return c;
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Json to_json(const PDF& pdf) {
    Json bands = Json::array();
    for (const auto& b : pdf.bands()) bands.push_back(std::vector<double>(b.data(), b.data() + b.size()));
    return {{"property", std::string(property_name(pdf.property()))}, {"order", pdf.order()}, {"bands", bands}};
}

PDF pdf_from_json(const Json& j) {
    const Property p = property_field(j, "property");
    const int order = field<int>(j, "order");
    const auto raw = field<std::vector<std::vector<double>>>(j, "bands");
    if (order < 0 || raw.size() != static_cast<std::size_t>(order + 1)) {
        throw ParseError("PDF band count does not match order " + std::to_string(order));
    }
    std::vector<Eigen::VectorXd> bands;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].size() != 2 * i + 1) throw ParseError("PDF band " + std::to_string(i) + " has wrong length");
        bands.emplace_back(Eigen::Map<const Eigen::VectorXd>(raw[i].data(), raw[i].size()));
    }
    return PDF(p, std::move(bands));
}

std::vector<unsigned char> pdf_to_binary(const PDF& pdf) {
    static_assert(std::endian::native == std::endian::little, "binary PDF writer assumes little-endian");
    std::vector<unsigned char> out(std::begin(kPdfMagic), std::end(kPdfMagic));
    auto put = [&out](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        out.insert(out.end(), b, b + n);
    };
    const std::int32_t prop = static_cast<std::int32_t>(pdf.property());
    const std::int32_t order = pdf.order();
    put(&prop, 4);
    put(&order, 4);
    const Eigen::VectorXd flat = pdf.flatten();
    put(flat.data(), sizeof(double) * flat.size());
    return out;
}

PDF pdf_from_binary(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 14 || std::memcmp(bytes.data(), kPdfMagic, 6) != 0) throw ParseError("not a binary PDF");
    std::int32_t prop = 0, order = 0;
    std::memcpy(&prop, bytes.data() + 6, 4);
    std::memcpy(&order, bytes.data() + 10, 4);
    if (prop < 0 || prop > static_cast<int>(Property::kSaturation) || order < 0 || order > 1000) {
        throw ParseError("corrupt binary PDF header");
    }
    const std::size_t n = sh_count(order);
    if (bytes.size() != 14 + n * sizeof(double)) throw ParseError("binary PDF has wrong length");
    Eigen::VectorXd flat(n);
    std::memcpy(flat.data(), bytes.data() + 14, n * sizeof(double));
    return PDF::from_flat(static_cast<Property>(prop), order, flat);
}

Json to_json(const PDM& pdm) {
    Json bands = Json::array(), rotations = Json::array();
    for (const auto& m : pdm.bands) bands.push_back(matrix_json(m));
    for (const auto& m : pdm.rotations) rotations.push_back(matrix_json(m));
    return {{"from", std::string(property_name(pdm.from))},
            {"to", std::string(property_name(pdm.to))},
            {"order", pdm.order()},
            {"bands", bands},
            {"rotations", rotations},
            {"src_norms", pdm.src_norms},
            {"tar_norms", pdm.tar_norms},
            {"excluded", pdm.excluded},
            {"improper", pdm.improper},
            {"scaled_rotations", pdm.scaled_rotations}};
}

PDM pdm_from_json(const Json& j) {
    PDM p;
    p.from = property_field(j, "from");
    p.to = property_field(j, "to");
    for (const auto& b : field<Json>(j, "bands")) p.bands.push_back(matrix_from_json(b));
    for (std::size_t i = 0; i < p.bands.size(); ++i) {
        const auto d = static_cast<Eigen::Index>(2 * i + 1);
        if (p.bands[i].rows() != d || p.bands[i].cols() != d) {
            throw ParseError("PDM band " + std::to_string(i) + " is not " + std::to_string(d) + "x" +
                             std::to_string(d));
        }
    }
    if (field<int>(j, "order") != p.order()) throw ParseError("PDM order does not match its band count");
    if (j.contains("rotations")) {
        for (const auto& b : j.at("rotations")) p.rotations.push_back(matrix_from_json(b));
    }
    if (j.contains("src_norms")) p.src_norms = field<std::vector<double>>(j, "src_norms");
    if (j.contains("tar_norms")) p.tar_norms = field<std::vector<double>>(j, "tar_norms");
    p.excluded = field<std::vector<int>>(j, "excluded");
    if (j.contains("improper")) p.improper = field<std::vector<int>>(j, "improper");
    if (j.contains("scaled_rotations")) p.scaled_rotations = field<bool>(j, "scaled_rotations");
    return p;
}

Json to_json(const MatchWeights& w) {
    return {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}, {"delta", w.delta}, {"lambda", w.lambda}};
}

MatchWeights weights_from_json(const Json& j) {
    MatchWeights w;
    w.alpha = field<double>(j, "alpha");
    w.beta = field<double>(j, "beta");
    w.gamma = field<double>(j, "gamma");
    w.delta = field<double>(j, "delta");
    w.lambda = field<double>(j, "lambda");
    return w;
}

Json to_json(const MatchResult& r) {
    Json matches = Json::array();
    for (const auto& m : r.matches) {
        matches.push_back({{"tar_id", m.tar_id},
                           {"src_id", m.src_id},
                           {"costs", costs_json(m.costs)},
                           {"raw_costs", costs_json(m.raw)},
                           {"total", m.total}});
    }
    return {{"matches", matches},
            {"weights", to_json(r.weights)},
            {"normalized", r.normalized},
            {"src_ids", r.src_ids},
            {"tar_ids", r.tar_ids},
            {"total", r.total}};
}

MatchResult match_result_from_json(const Json& j) {
    MatchResult r;
    for (const auto& m : field<Json>(j, "matches")) {
        MatchEntry e;
        e.tar_id = field<int>(m, "tar_id");
        e.src_id = field<int>(m, "src_id");
        e.costs = costs_from_json(field<Json>(m, "costs"));
        e.raw = m.contains("raw_costs") ? costs_from_json(m.at("raw_costs")) : e.costs;
        e.total = field<double>(m, "total");
        r.matches.push_back(e);
    }
    r.weights = weights_from_json(field<Json>(j, "weights"));
    if (j.contains("normalized")) r.normalized = field<bool>(j, "normalized");
    if (j.contains("src_ids")) r.src_ids = field<std::vector<int>>(j, "src_ids");
    if (j.contains("tar_ids")) r.tar_ids = field<std::vector<int>>(j, "tar_ids");
    if (j.contains("total")) r.total = field<std::vector<std::vector<double>>>(j, "total");
    return r;
}

Json to_json(const PatchSet& set) {
    Json patches = Json::array();
    for (const auto& p : set.patches) {
        patches.push_back({{"id", p.id},
                           {"area", p.area},
                           {"n_faces", p.face_ids.size()},
                           {"n_vertices", p.vertex_ids.size()},
                           {"n_boundary_loops", p.boundary_loops.size()},
                           {"is_background", p.is_background}});
    }
    return {{"patches", patches},
            {"k", set.k},
            {"otsu_threshold", set.otsu_threshold},
            {"degenerate", set.degenerate},
            {"warnings", set.warnings},
            {"face_labels", set.face_labels}};
}

PatchSet patch_set_from_json(const Json& j, const Mesh& mesh) {
    auto labels = field<std::vector<int>>(j, "face_labels");
    if (labels.size() != mesh.faces.size()) {
        throw ParseError("patch manifest has " + std::to_string(labels.size()) + " face labels, mesh has " +
                         std::to_string(mesh.faces.size()) + " faces");
    }
    const HalfEdgeMesh hem(mesh);
    PatchSet set = patches_from_face_labels(mesh, hem, std::move(labels));
    if (j.contains("k")) set.k = field<double>(j, "k");
    if (j.contains("otsu_threshold")) set.otsu_threshold = field<double>(j, "otsu_threshold");
    if (j.contains("degenerate")) set.degenerate = field<bool>(j, "degenerate");
    if (j.contains("warnings")) set.warnings = field<std::vector<std::string>>(j, "warnings");
    return set;
}

Json to_json(const std::vector<PatchPdfs>& pdfs) {
    Json patches = Json::array();
    for (const auto& p : pdfs) {
        Json fits = Json::object(), residuals = Json::object();
        for (const auto& [prop, pdf] : p.pdfs) fits[std::string(property_name(prop))] = to_json(pdf);
        for (const auto& [prop, r] : p.residual_rms) residuals[std::string(property_name(prop))] = r;
        patches.push_back({{"id", p.id}, {"pdfs", fits}, {"residual_rms", residuals}});
    }
    return {{"patches", patches}};
}

std::vector<PatchPdfs> patch_pdfs_from_json(const Json& j) {
    std::vector<PatchPdfs> out;
    for (const auto& p : field<Json>(j, "patches")) {
        PatchPdfs pp;
        pp.id = field<int>(p, "id");
        const Json fits = field<Json>(p, "pdfs");
        for (const auto& [name, pdf] : fits.items()) {
            PDF f = pdf_from_json(pdf);
            pp.pdfs.emplace(f.property(), std::move(f));
        }
        if (p.contains("residual_rms")) {
            for (const auto& [name, r] : p.at("residual_rms").items()) {
                pp.residual_rms[parse_property(name)] = r.get<double>();
            }
        }
        out.push_back(std::move(pp));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].id != static_cast<int>(i)) throw ParseError("PDF list is not ordered by patch id");
    }
    return out;
}

Json to_json(const EvalReport& r) {
    Json per = Json::array();
    for (const auto& p : r.per_patch) {
        per.push_back({{"id", p.id},
                       {"vertices", p.vertices},
                       {"mean_abs_err_hue", p.mean_abs_err_hue},
                       {"mean_abs_err_sat", p.mean_abs_err_sat}});
    }
    return {{"vertices", r.vertices},
            {"mean_abs_err_hue", r.mean_abs_err_hue},
            {"mean_abs_err_sat", r.mean_abs_err_sat},
            {"accuracy_hue", r.accuracy_hue},
            {"accuracy_sat", r.accuracy_sat},
            {"per_patch", per}};
}

EvalReport eval_report_from_json(const Json& j) {
    EvalReport r;
    r.vertices = field<int>(j, "vertices");
    r.mean_abs_err_hue = field<double>(j, "mean_abs_err_hue");
    r.mean_abs_err_sat = field<double>(j, "mean_abs_err_sat");
    r.accuracy_hue = field<double>(j, "accuracy_hue");
    r.accuracy_sat = field<double>(j, "accuracy_sat");
    if (j.contains("per_patch")) {
        for (const auto& p : j.at("per_patch")) {
            PatchError e;
            e.id = field<int>(p, "id");
            e.vertices = field<int>(p, "vertices");
            e.mean_abs_err_hue = field<double>(p, "mean_abs_err_hue");
            e.mean_abs_err_sat = field<double>(p, "mean_abs_err_sat");
            r.per_patch.push_back(e);
        }
    }
    return r;
}

Json to_json(const LandmarkSet& l) {
    Json vp = Json::array(), dp = Json::array();
    for (const auto& [a, b] : l.vertex_pairs) vp.push_back({a, b});
    for (const auto& [a, b] : l.direction_pairs) dp.push_back({vec3_json(a), vec3_json(b)});
    return {{"vertex_pairs", vp}, {"direction_pairs", dp}};
}

LandmarkSet landmarks_from_json(const Json& j) {
    LandmarkSet l;
    if (j.contains("vertex_pairs")) {
        for (const auto& p : j.at("vertex_pairs")) {
            if (!p.is_array() || p.size() != 2) throw ParseError("vertex pair must have two entries");
            l.vertex_pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
        }
    }
    if (j.contains("direction_pairs")) {
        for (const auto& p : j.at("direction_pairs")) {
            if (!p.is_array() || p.size() != 2) throw ParseError("direction pair must have two entries");
            l.direction_pairs.emplace_back(vec3_from_json(p[0]), vec3_from_json(p[1]));
        }
    }
    return l;
}

Json energy_trace_json(const SphericalMesh& sm) {
    std::vector<int> iters(sm.energy_trace.size());
    for (std::size_t i = 0; i < iters.size(); ++i) iters[i] = static_cast<int>(i);
    return {{"iters", iters},
            {"energy", sm.energy_trace},
            {"iterations", sm.iterations},
            {"converged", sm.converged}};
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    make_parent_dirs(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    make_parent_dirs(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace stylexfer
