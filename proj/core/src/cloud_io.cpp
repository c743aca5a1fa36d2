#include "recon/cloud_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace recon {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// ---------------------------------------------------------------------------
// PLY machinery shared by the cloud reader and the mesh reader.

enum class PType : std::uint8_t { I8, U8, I16, U16, I32, U32, F32, F64 };

std::size_t psize(PType t) {
    switch (t) {
        case PType::I8:
        case PType::U8: return 1;
        case PType::I16:
        case PType::U16: return 2;
        case PType::I32:
        case PType::U32:
        case PType::F32: return 4;
        case PType::F64: return 8;
    }
    return 0;
}

bool parse_ptype(const std::string& word, PType& out) {
    if (word == "char" || word == "int8") out = PType::I8;
    else if (word == "uchar" || word == "uint8") out = PType::U8;
    else if (word == "short" || word == "int16") out = PType::I16;
    else if (word == "ushort" || word == "uint16") out = PType::U16;
    else if (word == "int" || word == "int32") out = PType::I32;
    else if (word == "uint" || word == "uint32") out = PType::U32;
    else if (word == "float" || word == "float32") out = PType::F32;
    else if (word == "double" || word == "float64") out = PType::F64;
    else return false;
    return true;
}

double decode(const char* p, PType t) {
    switch (t) {
        case PType::I8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
        case PType::U8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
        case PType::I16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
        case PType::U16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
        case PType::I32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
        case PType::U32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
        case PType::F32: { float v; std::memcpy(&v, p, 4); return v; }
        case PType::F64: { double v; std::memcpy(&v, p, 8); return v; }
    }
    return 0.0;
}

struct PlyProp {
    std::string name;
    PType type = PType::F32;
    bool is_list = false;
    PType count_type = PType::U8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProp> props;
};

struct PlyHeader {
    bool binary = false;
    std::vector<PlyElement> elements;
    std::size_t payload_offset = 0;  // byte offset of the first payload byte
};

PlyHeader parse_ply_header(const std::string& buf, const std::string& path) {
    PlyHeader hdr;
    std::size_t pos = 0;
    bool first = true, have_format = false, done = false;
    while (pos < buf.size()) {
        std::size_t eol = buf.find('\n', pos);
        if (eol == std::string::npos) fail(path, "PLY header has no end_header");
        std::string line = buf.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (first) {
            if (word != "ply") fail(path, "not a PLY file (missing magic)");
            first = false;
            continue;
        }
        if (word == "comment" || word == "obj_info" || word.empty()) continue;
        if (word == "format") {
            std::string kind, version;
            ls >> kind >> version;
            if (kind == "ascii") hdr.binary = false;
            else if (kind == "binary_little_endian") hdr.binary = true;
            else fail(path, "unsupported PLY format '" + kind + "'");
            have_format = true;
            continue;
        }
        if (word == "element") {
            PlyElement el;
            if (!(ls >> el.name >> el.count)) fail(path, "malformed PLY element line");
            hdr.elements.push_back(std::move(el));
            continue;
        }
        if (word == "property") {
            if (hdr.elements.empty()) fail(path, "PLY property before any element");
            PlyProp prop;
            std::string t;
            ls >> t;
            if (t == "list") {
                prop.is_list = true;
                std::string ct, vt;
                ls >> ct >> vt >> prop.name;
                if (!parse_ptype(ct, prop.count_type) || !parse_ptype(vt, prop.type))
                    fail(path, "unsupported PLY list property types");
            } else {
                ls >> prop.name;
                if (!parse_ptype(t, prop.type)) fail(path, "unsupported PLY property type '" + t + "'");
            }
            if (prop.name.empty()) fail(path, "malformed PLY property line");
            hdr.elements.back().props.push_back(std::move(prop));
            continue;
        }
        if (word == "end_header") {
            done = true;
            break;
        }
        fail(path, "unrecognized PLY header line '" + line + "'");
    }
    if (!done) fail(path, "PLY header has no end_header");
    if (!have_format) fail(path, "PLY header has no format line");
    hdr.payload_offset = pos;
    return hdr;
}

// Reads all rows of one element. `want` maps property names to output column
// slots; each row produces one vector of the wanted values (in slot order).
// Unwanted properties and list payloads are skipped.
std::vector<std::vector<double>> read_ply_element(const std::string& buf, const std::string& path,
                                                  const PlyHeader& hdr, const PlyElement& el,
                                                  std::size_t& cursor, std::istringstream& tokens,
                                                  const std::vector<std::string>& want,
                                                  std::vector<std::vector<double>>* lists = nullptr) {
    std::vector<int> slot(el.props.size(), -1);
    for (std::size_t p = 0; p < el.props.size(); ++p)
        for (std::size_t w = 0; w < want.size(); ++w)
            if (el.props[p].name == want[w]) slot[p] = static_cast<int>(w);

    std::vector<std::vector<double>> rows;
    rows.reserve(el.count);
    for (std::size_t r = 0; r < el.count; ++r) {
        std::vector<double> row(want.size(), 0.0);
        for (std::size_t p = 0; p < el.props.size(); ++p) {
            const PlyProp& prop = el.props[p];
            if (prop.is_list) {
                std::size_t n = 0;
                if (hdr.binary) {
                    if (cursor + psize(prop.count_type) > buf.size()) fail(path, "PLY payload truncated");
                    n = static_cast<std::size_t>(decode(buf.data() + cursor, prop.count_type));
                    cursor += psize(prop.count_type);
                } else {
                    double d;
                    if (!(tokens >> d)) fail(path, "PLY payload truncated");
                    n = static_cast<std::size_t>(d);
                }
                std::vector<double> items;
                if (lists) items.reserve(n);
                for (std::size_t k = 0; k < n; ++k) {
                    double d;
                    if (hdr.binary) {
                        if (cursor + psize(prop.type) > buf.size()) fail(path, "PLY payload truncated");
                        d = decode(buf.data() + cursor, prop.type);
                        cursor += psize(prop.type);
                    } else if (!(tokens >> d)) {
                        fail(path, "PLY payload truncated");
                    }
                    if (lists) items.push_back(d);
                }
                if (lists) lists->push_back(std::move(items));
            } else {
                double d;
                if (hdr.binary) {
                    if (cursor + psize(prop.type) > buf.size()) fail(path, "PLY payload truncated");
                    d = decode(buf.data() + cursor, prop.type);
                    cursor += psize(prop.type);
                } else if (!(tokens >> d)) {
                    fail(path, "PLY payload truncated");
                }
                if (slot[p] >= 0) row[static_cast<std::size_t>(slot[p])] = d;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

bool element_has(const PlyElement& el, const char* name) {
    for (const PlyProp& p : el.props)
        if (!p.is_list && p.name == name) return true;
    return false;
}

// ---------------------------------------------------------------------------

struct RawCloud {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;  // empty when the file carries none
};

RawCloud read_ply_cloud(const std::string& path) {
    const std::string buf = slurp(path);
    PlyHeader hdr = parse_ply_header(buf, path);
    std::size_t cursor = hdr.payload_offset;
    std::istringstream tokens;
    if (!hdr.binary) tokens.str(buf.substr(hdr.payload_offset));

    RawCloud out;
    for (const PlyElement& el : hdr.elements) {
        if (el.name != "vertex") {
            // Skip a non-vertex element that precedes the vertex data.
            read_ply_element(buf, path, hdr, el, cursor, tokens, {});
            continue;
        }
        if (!element_has(el, "x") || !element_has(el, "y") || !element_has(el, "z"))
            fail(path, "PLY vertex element lacks x/y/z properties");
        bool with_n = element_has(el, "nx") && element_has(el, "ny") && element_has(el, "nz");
        auto rows = read_ply_element(buf, path, hdr, el, cursor, tokens,
                                     {"x", "y", "z", "nx", "ny", "nz"});
        out.positions.reserve(rows.size());
        if (with_n) out.normals.reserve(rows.size());
        for (const auto& r : rows) {
            out.positions.push_back({r[0], r[1], r[2]});
            if (with_n) out.normals.push_back({r[3], r[4], r[5]});
        }
        return out;  // later elements (faces etc.) are irrelevant for clouds
    }
    fail(path, "PLY file has no vertex element");
}

RawCloud read_text_cloud(const std::string& path) {
    const std::string buf = slurp(path);
    RawCloud out;
    std::istringstream in(buf);
    std::string line;
    int columns = 0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (std::size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<double> vals;
        double d;
        while (ls >> d) vals.push_back(d);
        if (!ls.eof()) {
            std::string tok;
            ls.clear();
            ls >> tok;
            fail(path, "line " + std::to_string(lineno) + ": cannot parse '" + tok + "' as a number");
        }
        if (vals.empty()) continue;  // blank or comment-only line
        if (columns == 0) {
            if (vals.size() != 3 && vals.size() != 6)
                fail(path, "line " + std::to_string(lineno) + ": expected 3 or 6 numbers per line, got "
                               + std::to_string(vals.size()));
            columns = static_cast<int>(vals.size());
        } else if (vals.size() != static_cast<std::size_t>(columns)) {
            fail(path, "line " + std::to_string(lineno) + ": expected " + std::to_string(columns)
                           + " numbers, got " + std::to_string(vals.size()));
        }
        out.positions.push_back({vals[0], vals[1], vals[2]});
        if (columns == 6) out.normals.push_back({vals[3], vals[4], vals[5]});
    }
    if (out.positions.empty()) fail(path, "no points found");
    return out;
}

std::vector<Vec3> read_viewdir_file(const std::string& path, std::size_t expected) {
    const std::string buf = slurp(path);
    std::vector<Vec3> dirs;
    std::istringstream in(buf);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (std::size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<double> vals;
        double d;
        while (ls >> d) vals.push_back(d);
        if (vals.empty()) continue;
        if (vals.size() != 3)
            fail(path, "line " + std::to_string(lineno) + ": expected 3 numbers, got "
                           + std::to_string(vals.size()));
        dirs.push_back({vals[0], vals[1], vals[2]});
    }
    if (dirs.size() != expected)
        fail(path, "view-direction count (" + std::to_string(dirs.size())
                       + ") does not match point count (" + std::to_string(expected) + ")");
    return dirs;
}

bool has_extension(const std::string& path, const char* ext) {
    std::size_t dot = path.rfind('.');
    if (dot == std::string::npos) return false;
    return lower(path.substr(dot)) == ext;
}

void append_g17(std::string& out, double v) {
    char tmp[64];
    std::snprintf(tmp, sizeof(tmp), "%.17g", v);
    out += tmp;
}

template <typename T>
void append_le(std::string& out, T v) {
    char tmp[sizeof(T)];
    std::memcpy(tmp, &v, sizeof(T));
    out.append(tmp, sizeof(T));
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error(path + ": cannot open for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error(path + ": write failed");
}

}  // namespace

CloudReadResult read_cloud(const std::string& path, const OrientationSource& source) {
    RawCloud raw = has_extension(path, ".ply") ? read_ply_cloud(path) : read_text_cloud(path);
    if (raw.positions.empty()) fail(path, "no points found");

    // Per-point file normals take precedence over any view-direction source.
    std::vector<Vec3> orient;
    if (!raw.normals.empty()) {
        orient = std::move(raw.normals);
    } else if (source.kind == OrientationSource::Kind::ViewDir) {
        orient.assign(raw.positions.size(), source.viewdir);
    } else if (source.kind == OrientationSource::Kind::ViewDirFile) {
        orient = read_viewdir_file(source.viewdir_file, raw.positions.size());
    } else {
        fail(path, "no usable orientation: file has no normals and no view direction was given");
    }

    CloudReadResult result;
    result.samples.reserve(raw.positions.size());
    for (std::size_t i = 0; i < raw.positions.size(); ++i) {
        double n2 = norm2(orient[i]);
        if (!(n2 > 0.0)) {  // zero-length (or NaN) orientation: drop the point
            ++result.rejected;
            continue;
        }
        result.samples.push_back({raw.positions[i], orient[i] / std::sqrt(n2)});
    }
    if (result.samples.empty())
        fail(path, "zero surviving points: every point was rejected for unusable orientation");
    return result;
}

void write_mesh(const TriangleMesh& mesh, const std::string& path) {
    std::string out;
    if (has_extension(path, ".obj")) {
        out.reserve(mesh.vertices.size() * 64 + mesh.triangles.size() * 32);
        for (const Vec3& v : mesh.vertices) {
            out += "v ";
            append_g17(out, v.x);
            out += ' ';
            append_g17(out, v.y);
            out += ' ';
            append_g17(out, v.z);
            out += '\n';
        }
        for (const auto& t : mesh.triangles) {
            out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' '
                   + std::to_string(t[2] + 1) + '\n';
        }
    } else if (has_extension(path, ".ply")) {
        out += "ply\nformat binary_little_endian 1.0\n";
        out += "element vertex " + std::to_string(mesh.vertices.size()) + '\n';
        out += "property float x\nproperty float y\nproperty float z\n";
        out += "element face " + std::to_string(mesh.triangles.size()) + '\n';
        out += "property list uchar int vertex_indices\nend_header\n";
        out.reserve(out.size() + mesh.vertices.size() * 12 + mesh.triangles.size() * 13);
        for (const Vec3& v : mesh.vertices) {
            append_le(out, static_cast<float>(v.x));
            append_le(out, static_cast<float>(v.y));
            append_le(out, static_cast<float>(v.z));
        }
        for (const auto& t : mesh.triangles) {
            append_le<std::uint8_t>(out, 3);
            append_le(out, static_cast<std::int32_t>(t[0]));
            append_le(out, static_cast<std::int32_t>(t[1]));
            append_le(out, static_cast<std::int32_t>(t[2]));
        }
    } else {
        throw std::runtime_error(path + ": unsupported mesh format (use .obj or .ply)");
    }
    write_file(path, out);
}

TriangleMesh read_mesh_ply(const std::string& path) {
    const std::string buf = slurp(path);
    PlyHeader hdr = parse_ply_header(buf, path);
    std::size_t cursor = hdr.payload_offset;
    std::istringstream tokens;
    if (!hdr.binary) tokens.str(buf.substr(hdr.payload_offset));

    TriangleMesh mesh;
    for (const PlyElement& el : hdr.elements) {
        if (el.name == "vertex") {
            if (!element_has(el, "x") || !element_has(el, "y") || !element_has(el, "z"))
                fail(path, "PLY vertex element lacks x/y/z properties");
            auto rows = read_ply_element(buf, path, hdr, el, cursor, tokens, {"x", "y", "z"});
            mesh.vertices.reserve(rows.size());
            for (const auto& r : rows) mesh.vertices.push_back({r[0], r[1], r[2]});
        } else if (el.name == "face") {
            std::vector<std::vector<double>> lists;
            read_ply_element(buf, path, hdr, el, cursor, tokens, {}, &lists);
            mesh.triangles.reserve(lists.size());
            for (const auto& poly : lists) {
                if (poly.size() != 3) fail(path, "PLY face is not a triangle");
                mesh.triangles.push_back({static_cast<std::uint32_t>(poly[0]),
                                          static_cast<std::uint32_t>(poly[1]),
                                          static_cast<std::uint32_t>(poly[2])});
            }
        } else {
            read_ply_element(buf, path, hdr, el, cursor, tokens, {});
        }
    }
    for (const auto& t : mesh.triangles)
        for (std::uint32_t ix : t)
            if (ix >= mesh.vertices.size()) fail(path, "PLY face index out of range");
    return mesh;
}

void write_cloud_text(const std::vector<PointSample>& samples, const std::string& path) {
    std::string out;
    out.reserve(samples.size() * 128);
    for (const PointSample& s : samples) {
        append_g17(out, s.p.x);
        out += ' ';
        append_g17(out, s.p.y);
        out += ' ';
        append_g17(out, s.p.z);
        out += ' ';
        append_g17(out, s.v.x);
        out += ' ';
        append_g17(out, s.v.y);
        out += ' ';
        append_g17(out, s.v.z);
        out += '\n';
    }
    write_file(path, out);
}

}  // namespace recon
