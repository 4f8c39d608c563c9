#include "stylexfer/mesh_io.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/fsutil.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace stylexfer {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "binary PLY IO assumes a little-endian host");

enum class PlyType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

PlyType parse_type(const std::string& t) {
    if (t == "char" || t == "int8") return PlyType::kInt8;
    if (t == "uchar" || t == "uint8") return PlyType::kUInt8;
    if (t == "short" || t == "int16") return PlyType::kInt16;
    if (t == "ushort" || t == "uint16") return PlyType::kUInt16;
    if (t == "int" || t == "int32") return PlyType::kInt32;
    if (t == "uint" || t == "uint32") return PlyType::kUInt32;
    if (t == "float" || t == "float32") return PlyType::kFloat32;
    if (t == "double" || t == "float64") return PlyType::kFloat64;
    throw ParseError("unknown PLY property type '" + t + "'");
}

std::size_t type_size(PlyType t) {
    switch (t) {
        case PlyType::kInt8:
        case PlyType::kUInt8: return 1;
        case PlyType::kInt16:
        case PlyType::kUInt16: return 2;
        case PlyType::kInt32:
        case PlyType::kUInt32:
        case PlyType::kFloat32: return 4;
        case PlyType::kFloat64: return 8;
    }
    return 0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::kFloat32;
    bool is_list = false;
    PlyType count_type = PlyType::kUInt8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

struct PlyHeader {
    bool binary = false;
    std::vector<PlyElement> elements;
};

PlyHeader read_header(std::istream& in, const std::string& where) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw ParseError(where + ": missing 'ply' magic");
    PlyHeader h;
    bool have_format = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key.empty() || key == "comment" || key == "obj_info") continue;
        if (key == "end_header") {
            if (!have_format) throw ParseError(where + ": missing format line");
            return h;
        }
        if (key == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii") h.binary = false;
            else if (fmt == "binary_little_endian") h.binary = true;
            else throw ParseError(where + ": unsupported PLY format '" + fmt + "'");
            have_format = true;
        } else if (key == "element") {
            PlyElement e;
            long long count = -1;
            ls >> e.name >> count;
            if (e.name.empty() || count < 0) throw ParseError(where + ": malformed element line '" + line + "'");
            e.count = static_cast<std::size_t>(count);
            h.elements.push_back(std::move(e));
        } else if (key == "property") {
            if (h.elements.empty()) throw ParseError(where + ": property before element");
            PlyProperty p;
            std::string t;
            ls >> t;
            if (t == "list") {
                std::string ct, it;
                ls >> ct >> it >> p.name;
                p.is_list = true;
                p.count_type = parse_type(ct);
                p.type = parse_type(it);
            } else {
                p.type = parse_type(t);
                ls >> p.name;
            }
            if (p.name.empty()) throw ParseError(where + ": malformed property line '" + line + "'");
            h.elements.back().properties.push_back(std::move(p));
        } else {
            throw ParseError(where + ": unexpected header line '" + line + "'");
        }
    }
    throw ParseError(where + ": header not terminated by end_header");
}

double read_binary(std::istream& in, PlyType t, const std::string& where) {
    char buf[8];
    const std::size_t n = type_size(t);
    if (!in.read(buf, static_cast<std::streamsize>(n))) throw ParseError(where + ": unexpected end of binary data");
    switch (t) {
        case PlyType::kInt8: { std::int8_t v; std::memcpy(&v, buf, 1); return v; }
        case PlyType::kUInt8: { std::uint8_t v; std::memcpy(&v, buf, 1); return v; }
        case PlyType::kInt16: { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
        case PlyType::kUInt16: { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
        case PlyType::kInt32: { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
        case PlyType::kUInt32: { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
        case PlyType::kFloat32: { float v; std::memcpy(&v, buf, 4); return v; }
        case PlyType::kFloat64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0.0;
}

/// Token reader over the ASCII body, one element row per line.
class AsciiRows {
public:
    AsciiRows(std::istream& in, std::string where) : in_(in), where_(std::move(where)) {}

    void next_row(std::size_t row) {
        std::string line;
        do {
            if (!std::getline(in_, line)) {
                throw ParseError(where_ + ": data ends before row " + std::to_string(row));
            }
        } while (line.find_first_not_of(" \t\r") == std::string::npos);
        tokens_.clear();
        pos_ = 0;
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens_.push_back(tok);
        row_ = row;
    }

    double next() {
        if (pos_ >= tokens_.size()) {
            throw ParseError(where_ + ": attribute length mismatch: row " + std::to_string(row_) +
                             " has too few values");
        }
        const std::string& tok = tokens_[pos_++];
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw ParseError(where_ + ": bad number '" + tok + "' in row " + std::to_string(row_));
        }
        return v;
    }

    void end_row() const {
        if (pos_ != tokens_.size()) {
            throw ParseError(where_ + ": attribute length mismatch: row " + std::to_string(row_) +
                             " has extra values");
        }
    }

private:
    std::istream& in_;
    std::string where_;
    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
    std::size_t row_ = 0;
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct VectorGroup {
    std::string channel;
    std::array<std::string, 3> props;
    bool unit_color;  // uchar 0..255 mapped to [0,1]
};

Mesh assemble_vertices(const PlyElement& el, const std::vector<std::vector<double>>& columns,
                       const std::string& where) {
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < el.properties.size(); ++i) idx[el.properties[i].name] = i;
    for (const char* c : {"x", "y", "z"}) {
        if (!idx.count(c)) throw ParseError(where + ": vertex element lacks property '" + std::string(c) + "'");
    }
    Mesh mesh;
    mesh.vertices.resize(el.count);
    for (std::size_t v = 0; v < el.count; ++v) {
        mesh.vertices[v] = Vec3(columns[idx["x"]][v], columns[idx["y"]][v], columns[idx["z"]][v]);
    }
    std::set<std::string> consumed{"x", "y", "z"};

    std::vector<VectorGroup> groups{{channel::kBispectral, {"red", "green", "blue"}, true},
                                    {channel::kColor, {"color_r", "color_g", "color_b"}, true},
                                    {channel::kSphere, {"sx", "sy", "sz"}, false}};
    for (const auto& p : el.properties) {
        if (ends_with(p.name, "_x")) {
            const std::string base = p.name.substr(0, p.name.size() - 2);
            if (idx.count(base + "_y") && idx.count(base + "_z")) {
                groups.push_back({base, {base + "_x", base + "_y", base + "_z"}, false});
            }
        }
    }
    for (const auto& g : groups) {
        if (!idx.count(g.props[0]) || !idx.count(g.props[1]) || !idx.count(g.props[2])) continue;
        std::vector<Vec3> values(el.count);
        const bool is_byte = el.properties[idx[g.props[0]]].type == PlyType::kUInt8;
        const double scale = (g.unit_color && is_byte) ? 1.0 / 255.0 : 1.0;
        for (std::size_t v = 0; v < el.count; ++v) {
            for (int k = 0; k < 3; ++k) values[v][k] = columns[idx[g.props[k]]][v] * scale;
        }
        mesh.set_vector(g.channel, std::move(values));
        consumed.insert(g.props.begin(), g.props.end());
    }
    for (std::size_t i = 0; i < el.properties.size(); ++i) {
        const auto& p = el.properties[i];
        if (consumed.count(p.name) || p.is_list) continue;
        mesh.set_scalar(p.name, columns[i]);
    }
    return mesh;
}

Mesh read_ply(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string where = path.string();
    const PlyHeader header = read_header(in, where);

    Mesh mesh;
    bool have_vertices = false;
    std::vector<Face> faces;
    AsciiRows ascii(in, where);

    for (const auto& el : header.elements) {
        const bool is_vertex = el.name == "vertex";
        const bool is_face = el.name == "face";
        std::vector<std::vector<double>> columns(el.properties.size());
        if (is_vertex) {
            for (auto& c : columns) c.reserve(el.count);
        }
        for (std::size_t row = 0; row < el.count; ++row) {
            if (!header.binary) ascii.next_row(row);
            for (std::size_t pi = 0; pi < el.properties.size(); ++pi) {
                const auto& p = el.properties[pi];
                if (p.is_list) {
                    const double raw = header.binary ? read_binary(in, p.count_type, where) : ascii.next();
                    if (raw < 0 || raw != std::floor(raw)) throw ParseError(where + ": bad list length");
                    const auto n = static_cast<std::size_t>(raw);
                    std::vector<int> idx(n);
                    for (std::size_t k = 0; k < n; ++k) {
                        idx[k] = static_cast<int>(header.binary ? read_binary(in, p.type, where) : ascii.next());
                    }
                    if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) {
                        if (n < 3) throw ParseError(where + ": face " + std::to_string(row) + " has fewer than 3 vertices");
                        for (std::size_t k = 1; k + 1 < n; ++k) faces.push_back({idx[0], idx[k], idx[k + 1]});
                    }
                } else {
                    const double v = header.binary ? read_binary(in, p.type, where) : ascii.next();
                    if (is_vertex) columns[pi].push_back(v);
                }
            }
            if (!header.binary) ascii.end_row();
        }
        if (is_vertex) {
            mesh = assemble_vertices(el, columns, where);
            have_vertices = true;
        }
    }
    if (!have_vertices) throw ParseError(where + ": no vertex element");
    mesh.faces = std::move(faces);
    return mesh;
}

Mesh read_obj(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    Mesh mesh;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z())) {
                throw ParseError(path.string() + ":" + std::to_string(lineno) + ": malformed vertex");
            }
            mesh.vertices.push_back(p);
        } else if (key == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                const std::string head = tok.substr(0, tok.find('/'));
                int i = 0;
                auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), i);
                if (ec != std::errc() || i == 0) {
                    throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad face index '" + tok + "'");
                }
                idx.push_back(i > 0 ? i - 1 : mesh.num_vertices() + i);
            }
            if (idx.size() < 3) throw ParseError(path.string() + ":" + std::to_string(lineno) + ": face needs 3 indices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
        }
    }
    return mesh;
}

void apply_sidecar(Mesh& mesh, const fs::path& sidecar) {
    std::ifstream in(sidecar);
    if (!in) throw IoError("cannot open sidecar " + sidecar.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(sidecar.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError(sidecar.string() + ": expected an object of channels");
    for (const auto& [name, values] : doc.items()) {
        if (!values.is_array()) throw ParseError(sidecar.string() + ": channel '" + name + "' is not an array");
        if (values.size() != mesh.vertices.size()) {
            throw InvalidArgument("attribute length mismatch: channel '" + name + "' has " +
                                  std::to_string(values.size()) + " entries for " +
                                  std::to_string(mesh.vertices.size()) + " vertices");
        }
        if (!values.empty() && values.front().is_array()) {
            std::vector<Vec3> vec(values.size());
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (values[i].size() != 3) throw ParseError(sidecar.string() + ": '" + name + "' entries must have 3 components");
                for (int k = 0; k < 3; ++k) vec[i][k] = values[i][k].get<double>();
            }
            mesh.set_vector(name, std::move(vec));
        } else {
            mesh.set_scalar(name, values.get<std::vector<double>>());
        }
    }
}

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

template <class T>
void put(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

std::string format_float(float v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Mesh load_mesh(const fs::path& path, std::optional<MeshFormat> format, const LoadOptions& options) {
    if (!fs::exists(path)) throw IoError("no such file: " + path.string());
    if (!format) {
        std::string ext = path.extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".ply") format = MeshFormat::kPly;
        else if (ext == ".obj") format = MeshFormat::kObj;
        else throw ParseError("cannot infer mesh format from '" + path.string() + "'");
    }
    Mesh mesh;
    if (*format == MeshFormat::kPly) {
        mesh = read_ply(path);
    } else {
        mesh = read_obj(path);
        fs::path sidecar = options.sidecar.value_or(fs::path(path.string() + ".json"));
        if (options.sidecar || fs::exists(sidecar)) apply_sidecar(mesh, sidecar);
    }
    mesh.check_invariants();
    if (options.require_genus_zero) {
        require_genus_zero(mesh);
    } else {
        mesh.set_topology(analyze_topology(mesh));
    }
    return mesh;
}

void save_mesh(const Mesh& mesh, const fs::path& path, const SaveOptions& options) {
    mesh.check_invariants();
    struct Column {
        std::string name;
        std::string type;
        const std::vector<double>* scalar = nullptr;
        const std::vector<Vec3>* vector = nullptr;
        int component = 0;
    };
    std::vector<Column> cols;
    auto add_vector = [&](const std::string& channel_name, const std::array<std::string, 3>& props,
                          const std::string& type) {
        const auto& values = mesh.vector(channel_name);
        for (int k = 0; k < 3; ++k) cols.push_back({props[k], type, nullptr, &values, k});
    };
    if (mesh.has_vector(options.rgb_channel)) add_vector(options.rgb_channel, {"red", "green", "blue"}, "uchar");
    for (const auto& [name, values] : mesh.vectors()) {
        if (name == options.rgb_channel) continue;
        if (name == channel::kSphere) add_vector(name, {"sx", "sy", "sz"}, "float");
        else if (name == channel::kColor) add_vector(name, {"color_r", "color_g", "color_b"}, "uchar");
        else add_vector(name, {name + "_x", name + "_y", name + "_z"}, "float");
    }
    for (const auto& [name, values] : mesh.scalars()) {
        cols.push_back({name, name == channel::kPatchId ? "int" : "float", &values, nullptr, 0});
    }

    const bool binary = options.encoding == PlyEncoding::kBinaryLittleEndian;
    std::string out;
    out += "ply\n";
    out += binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n";
    out += "comment stylexfer\n";
    for (const auto& c : options.comments) {
        if (c.find('\n') != std::string::npos) throw InvalidArgument("PLY comment contains a newline");
        out += "comment " + c + "\n";
    }
    out += "element vertex " + std::to_string(mesh.num_vertices()) + "\n";
    out += "property float x\nproperty float y\nproperty float z\n";
    for (const auto& c : cols) out += "property " + c.type + " " + c.name + "\n";
    out += "element face " + std::to_string(mesh.num_faces()) + "\n";
    out += "property list uchar int vertex_indices\n";
    out += "end_header\n";

    for (int v = 0; v < mesh.num_vertices(); ++v) {
        std::string ascii_row;
        auto emit_float = [&](double x) {
            if (binary) put(out, static_cast<float>(x));
            else ascii_row += (ascii_row.empty() ? "" : " ") + format_float(static_cast<float>(x));
        };
        for (int k = 0; k < 3; ++k) emit_float(mesh.vertices[v][k]);
        for (const auto& c : cols) {
            const double x = c.scalar ? (*c.scalar)[v] : (*c.vector)[v][c.component];
            if (c.type == "uchar") {
                const std::uint8_t b = to_byte(x);
                if (binary) put(out, b);
                else ascii_row += " " + std::to_string(b);
            } else if (c.type == "int") {
                const auto i = static_cast<std::int32_t>(std::lround(x));
                if (binary) put(out, i);
                else ascii_row += " " + std::to_string(i);
            } else {
                emit_float(x);
            }
        }
        if (!binary) out += ascii_row + "\n";
    }
    for (const Face& f : mesh.faces) {
        if (binary) {
            put(out, std::uint8_t{3});
            for (int idx : f) put(out, static_cast<std::int32_t>(idx));
        } else {
            out += "3 " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
        }
    }

    make_parent_dirs(path);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + path.string());
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace stylexfer
