#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "recon/cloud_io.hpp"
#include "test_util.hpp"

using namespace recon;
using doctest::Contains;
using testutil::read_binary;
using testutil::scratch_path;
using testutil::write_text;

namespace {

/// Writes `content` to a scratch file and returns its path; the file is left
/// behind in the build tree (names are prefixed so they are easy to sweep).
std::string stage_file(const std::string& name, const std::string& content) {
    std::string path = scratch_path(name);
    write_text(path, content);
    return path;
}

OrientationSource viewdir(double x, double y, double z) {
    OrientationSource s;
    s.kind = OrientationSource::Kind::ViewDir;
    s.viewdir = {x, y, z};
    return s;
}

OrientationSource viewdir_file(const std::string& path) {
    OrientationSource s;
    s.kind = OrientationSource::Kind::ViewDirFile;
    s.viewdir_file = path;
    return s;
}

void append_le_f32(std::string& out, float v) {
    char tmp[4];
    std::memcpy(tmp, &v, 4);
    out.append(tmp, 4);
}

void append_le_f64(std::string& out, double v) {
    char tmp[8];
    std::memcpy(tmp, &v, 8);
    out.append(tmp, 8);
}

void append_u8(std::string& out, std::uint8_t v) {
    out.push_back(static_cast<char>(v));
}

void append_le_i32(std::string& out, std::int32_t v) {
    char tmp[4];
    std::memcpy(tmp, &v, 4);
    out.append(tmp, 4);
}

bool same_vec(const Vec3& a, const Vec3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
}

}  // namespace

// ---------------------------------------------------------------------------
// Whitespace text clouds

TEST_CASE("six-column text rows carry positions and normals; comments and blanks skipped") {
    std::string path = stage_file("io_six_col.txt",
                                  "# header comment\n"
                                  "\n"
                                  "1 2 3 0 0 2   # trailing comment\n"
                                  "  4.5 -5 6e-1 0 -3 0\n"
                                  "\t7 8 9 1 0 0\n");
    CloudReadResult r = read_cloud(path, {});
    REQUIRE(r.samples.size() == 3);
    CHECK(r.rejected == 0);
    CHECK(same_vec(r.samples[0].p, {1.0, 2.0, 3.0}));
    CHECK(same_vec(r.samples[1].p, {4.5, -5.0, 0.6}));
    CHECK(same_vec(r.samples[2].p, {7.0, 8.0, 9.0}));
    // Orientation vectors come out unit length.
    CHECK(same_vec(r.samples[0].v, {0.0, 0.0, 1.0}));
    CHECK(same_vec(r.samples[1].v, {0.0, -1.0, 0.0}));
    CHECK(same_vec(r.samples[2].v, {1.0, 0.0, 0.0}));
}

TEST_CASE("three-column text with a view direction assigns one normalized direction to all") {
    std::string path = stage_file("io_three_col.txt", "0 0 0\n1 1 1\n-2 0 4\n");
    CloudReadResult r = read_cloud(path, viewdir(0.0, 0.0, -5.0));
    REQUIRE(r.samples.size() == 3);
    for (const PointSample& s : r.samples) CHECK(same_vec(s.v, {0.0, 0.0, -1.0}));
}

TEST_CASE("per-point file normals take precedence over a supplied view direction") {
    std::string path = stage_file("io_precedence.txt", "0 0 0 2 0 0\n1 1 1 0 2 0\n");
    CloudReadResult r = read_cloud(path, viewdir(0.0, 0.0, 1.0));
    REQUIRE(r.samples.size() == 2);
    CHECK(same_vec(r.samples[0].v, {1.0, 0.0, 0.0}));
    CHECK(same_vec(r.samples[1].v, {0.0, 1.0, 0.0}));
}

TEST_CASE("view-direction file supplies one direction per point, comments allowed") {
    std::string cloud = stage_file("io_vdf_cloud.txt", "0 0 0\n1 0 0\n2 0 0\n");
    std::string dirs = stage_file("io_vdf_dirs.txt",
                                  "# one line per point\n"
                                  "3 0 0\n"
                                  "0 0 -7\n"
                                  "\n"
                                  "0 5 0\n");
    CloudReadResult r = read_cloud(cloud, viewdir_file(dirs));
    REQUIRE(r.samples.size() == 3);
    CHECK(same_vec(r.samples[0].v, {1.0, 0.0, 0.0}));
    CHECK(same_vec(r.samples[1].v, {0.0, 0.0, -1.0}));
    CHECK(same_vec(r.samples[2].v, {0.0, 1.0, 0.0}));
}

TEST_CASE("view-direction file with the wrong line count is rejected") {
    std::string cloud = stage_file("io_vdf_short_cloud.txt", "0 0 0\n1 0 0\n2 0 0\n");
    std::string dirs = stage_file("io_vdf_short_dirs.txt", "1 0 0\n0 1 0\n");
    CHECK_THROWS_WITH_AS(read_cloud(cloud, viewdir_file(dirs)),
                         Contains("view-direction count (2) does not match point count (3)"),
                         std::runtime_error);
}

TEST_CASE("zero-length orientation vectors drop the point and are counted") {
    std::string path = stage_file("io_reject.txt",
                                  "0 0 0 1 0 0\n"
                                  "1 0 0 0 0 0\n"
                                  "2 0 0 0 0 1\n");
    CloudReadResult r = read_cloud(path, {});
    REQUIRE(r.samples.size() == 2);
    CHECK(r.rejected == 1);
    CHECK(same_vec(r.samples[0].p, {0.0, 0.0, 0.0}));
    CHECK(same_vec(r.samples[1].p, {2.0, 0.0, 0.0}));
}

TEST_CASE("a cloud whose every orientation is unusable is an error, not an empty result") {
    std::string path = stage_file("io_all_rejected.txt", "0 0 0 0 0 0\n1 1 1 0 0 0\n");
    CHECK_THROWS_WITH_AS(read_cloud(path, {}), Contains("zero surviving points"),
                         std::runtime_error);
}

TEST_CASE("three-column text without any orientation source is an error") {
    std::string path = stage_file("io_no_orient.txt", "0 0 0\n1 1 1\n");
    CHECK_THROWS_WITH_AS(read_cloud(path, {}), Contains("no usable orientation"),
                         std::runtime_error);
}

TEST_CASE("text parse errors carry the line number and the offending token") {
    std::string bad_tok = stage_file("io_bad_token.txt", "0 0 0\n1 1 bogus\n");
    CHECK_THROWS_WITH_AS(read_cloud(bad_tok, viewdir(0, 0, 1)),
                         Contains("line 2: cannot parse 'bogus' as a number"),
                         std::runtime_error);

    std::string bad_first = stage_file("io_bad_first.txt", "1 2 3 4\n");
    CHECK_THROWS_WITH_AS(read_cloud(bad_first, viewdir(0, 0, 1)),
                         Contains("line 1: expected 3 or 6 numbers per line, got 4"),
                         std::runtime_error);

    std::string mixed = stage_file("io_mixed_cols.txt", "1 2 3\n1 2 3 4 5 6\n");
    CHECK_THROWS_WITH_AS(read_cloud(mixed, viewdir(0, 0, 1)),
                         Contains("line 2: expected 3 numbers, got 6"), std::runtime_error);

    std::string empty = stage_file("io_empty.txt", "# nothing but comments\n\n");
    CHECK_THROWS_WITH_AS(read_cloud(empty, viewdir(0, 0, 1)), Contains("no points found"),
                         std::runtime_error);

    CHECK_THROWS_WITH_AS(read_cloud(scratch_path("io_does_not_exist.txt"), viewdir(0, 0, 1)),
                         Contains("cannot open file"), std::runtime_error);
}

// ---------------------------------------------------------------------------
// PLY clouds

TEST_CASE("ascii PLY with normals and an extra scalar property") {
    std::string path = stage_file("io_ascii.ply",
                                  "ply\n"
                                  "format ascii 1.0\n"
                                  "comment handcrafted fixture\n"
                                  "element vertex 2\n"
                                  "property float x\n"
                                  "property float y\n"
                                  "property float z\n"
                                  "property float nx\n"
                                  "property float ny\n"
                                  "property float nz\n"
                                  "property float confidence\n"
                                  "end_header\n"
                                  "1 2 3 0 0 4 0.9\n"
                                  "-1 -2 -3 5 0 0 0.1\n");
    CloudReadResult r = read_cloud(path, {});
    REQUIRE(r.samples.size() == 2);
    CHECK(same_vec(r.samples[0].p, {1.0, 2.0, 3.0}));
    CHECK(same_vec(r.samples[0].v, {0.0, 0.0, 1.0}));
    CHECK(same_vec(r.samples[1].p, {-1.0, -2.0, -3.0}));
    CHECK(same_vec(r.samples[1].v, {1.0, 0.0, 0.0}));
}

TEST_CASE("binary little-endian PLY: mixed property types, skipped columns, leading element") {
    // A one-row "camera" element precedes the vertices and must be skipped
    // byte-exactly; vertex rows interleave double positions, a uchar quality
    // column to ignore, and float normals.
    std::string header =
        "ply\n"
        "format binary_little_endian 1.0\n"
        "element camera 1\n"
        "property float cx\n"
        "property float cy\n"
        "property float cz\n"
        "element vertex 2\n"
        "property double x\n"
        "property double y\n"
        "property double z\n"
        "property uchar quality\n"
        "property float nx\n"
        "property float ny\n"
        "property float nz\n"
        "end_header\n";
    std::string body;
    append_le_f32(body, 9.0f);
    append_le_f32(body, 8.0f);
    append_le_f32(body, 7.0f);
    append_le_f64(body, 0.25);
    append_le_f64(body, -0.5);
    append_le_f64(body, 1.0 / 3.0);
    append_u8(body, 200);
    append_le_f32(body, 0.0f);
    append_le_f32(body, -6.0f);
    append_le_f32(body, 0.0f);
    append_le_f64(body, 4.0);
    append_le_f64(body, 5.0);
    append_le_f64(body, 6.0);
    append_u8(body, 1);
    append_le_f32(body, 0.0f);
    append_le_f32(body, 0.0f);
    append_le_f32(body, 3.0f);
    std::string path = stage_file("io_binary.ply", header + body);

    CloudReadResult r = read_cloud(path, {});
    REQUIRE(r.samples.size() == 2);
    CHECK(same_vec(r.samples[0].p, {0.25, -0.5, 1.0 / 3.0}));
    CHECK(same_vec(r.samples[0].v, {0.0, -1.0, 0.0}));
    CHECK(same_vec(r.samples[1].p, {4.0, 5.0, 6.0}));
    CHECK(same_vec(r.samples[1].v, {0.0, 0.0, 1.0}));
}

TEST_CASE("binary PLY without normals falls back to the view direction") {
    std::string header =
        "ply\n"
        "format binary_little_endian 1.0\n"
        "element vertex 1\n"
        "property float x\n"
        "property float y\n"
        "property float z\n"
        "end_header\n";
    std::string body;
    append_le_f32(body, 1.5f);
    append_le_f32(body, 2.5f);
    append_le_f32(body, 3.5f);
    std::string path = stage_file("io_binary_nonormals.ply", header + body);
    CloudReadResult r = read_cloud(path, viewdir(0.0, 2.0, 0.0));
    REQUIRE(r.samples.size() == 1);
    CHECK(same_vec(r.samples[0].p, {1.5, 2.5, 3.5}));
    CHECK(same_vec(r.samples[0].v, {0.0, 1.0, 0.0}));
}

TEST_CASE("PLY structural errors are reported with their cause") {
    std::string big = stage_file("io_big_endian.ply",
                                 "ply\nformat binary_big_endian 1.0\n"
                                 "element vertex 0\nproperty float x\nproperty float y\n"
                                 "property float z\nend_header\n");
    CHECK_THROWS_WITH_AS(read_cloud(big, viewdir(0, 0, 1)),
                         Contains("unsupported PLY format 'binary_big_endian'"),
                         std::runtime_error);

    std::string truncated_hdr =
        "ply\n"
        "format binary_little_endian 1.0\n"
        "element vertex 2\n"
        "property float x\nproperty float y\nproperty float z\n"
        "end_header\n";
    std::string short_body;
    append_le_f32(short_body, 1.0f);  // 4 of the 24 required payload bytes
    std::string truncated = stage_file("io_truncated.ply", truncated_hdr + short_body);
    CHECK_THROWS_WITH_AS(read_cloud(truncated, viewdir(0, 0, 1)),
                         Contains("PLY payload truncated"), std::runtime_error);

    std::string no_x = stage_file("io_missing_x.ply",
                                  "ply\nformat ascii 1.0\n"
                                  "element vertex 1\nproperty float y\nproperty float z\n"
                                  "end_header\n1 2\n");
    CHECK_THROWS_WITH_AS(read_cloud(no_x, viewdir(0, 0, 1)),
                         Contains("PLY vertex element lacks x/y/z properties"),
                         std::runtime_error);

    std::string no_magic = stage_file("io_no_magic.ply", "solid nonsense\n");
    CHECK_THROWS_WITH_AS(read_cloud(no_magic, viewdir(0, 0, 1)),
                         Contains("not a PLY file (missing magic)"), std::runtime_error);

    std::string no_end = stage_file("io_no_end.ply",
                                    "ply\nformat ascii 1.0\nelement vertex 1\n"
                                    "property float x\nproperty float y\nproperty float z\n");
    CHECK_THROWS_WITH_AS(read_cloud(no_end, viewdir(0, 0, 1)),
                         Contains("PLY header has no end_header"), std::runtime_error);

    std::string no_vertex = stage_file("io_no_vertex.ply",
                                       "ply\nformat ascii 1.0\nelement face 0\n"
                                       "property list uchar int vertex_indices\nend_header\n");
    CHECK_THROWS_WITH_AS(read_cloud(no_vertex, viewdir(0, 0, 1)),
                         Contains("PLY file has no vertex element"), std::runtime_error);
}

// ---------------------------------------------------------------------------
// Mesh writing and round-trips

TEST_CASE("OBJ writer emits the documented text layout byte for byte") {
    TriangleMesh mesh;
    mesh.vertices = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    mesh.triangles = {{0, 1, 2}};
    std::string path = scratch_path("io_golden.obj");
    write_mesh(mesh, path);
    CHECK(read_binary(path) == "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
}

TEST_CASE("OBJ writer keeps 17 significant digits so doubles survive a text round-trip") {
    TriangleMesh mesh;
    mesh.vertices = {{0.1, 1.0 / 3.0, -2.0e-17}};
    std::string path = scratch_path("io_digits.obj");
    write_mesh(mesh, path);
    std::string text = read_binary(path);
    CHECK(text == "v 0.10000000000000001 0.33333333333333331 -2.0000000000000001e-17\n");
}

TEST_CASE("binary PLY mesh round-trips: header golden, float32 positions, exact indices") {
    TriangleMesh mesh;
    mesh.vertices = {{0.1, 0.2, 0.3}, {1.0, 2.0, 3.0}, {-4.5, 0.0, 7.0}, {0.25, 0.5, 0.75}};
    mesh.triangles = {{0, 1, 2}, {2, 1, 3}};
    std::string path = scratch_path("io_roundtrip.ply");
    write_mesh(mesh, path);

    const std::string expected_header =
        "ply\nformat binary_little_endian 1.0\n"
        "element vertex 4\n"
        "property float x\nproperty float y\nproperty float z\n"
        "element face 2\n"
        "property list uchar int vertex_indices\nend_header\n";
    std::string bytes = read_binary(path);
    REQUIRE(bytes.size() == expected_header.size() + 4 * 12 + 2 * 13);
    CHECK(bytes.substr(0, expected_header.size()) == expected_header);

    TriangleMesh back = read_mesh_ply(path);
    REQUIRE(back.vertices.size() == mesh.vertices.size());
    REQUIRE(back.triangles.size() == mesh.triangles.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        // Positions quantize to float32 on write; the reader must return
        // exactly that quantized value, nothing looser.
        CHECK(back.vertices[i].x == static_cast<double>(static_cast<float>(mesh.vertices[i].x)));
        CHECK(back.vertices[i].y == static_cast<double>(static_cast<float>(mesh.vertices[i].y)));
        CHECK(back.vertices[i].z == static_cast<double>(static_cast<float>(mesh.vertices[i].z)));
    }
    CHECK(back.triangles == mesh.triangles);
}

TEST_CASE("mesh PLY reader rejects non-triangle faces and out-of-range indices") {
    std::string quad = stage_file("io_quad.ply",
                                  "ply\nformat ascii 1.0\n"
                                  "element vertex 4\n"
                                  "property float x\nproperty float y\nproperty float z\n"
                                  "element face 1\n"
                                  "property list uchar int vertex_indices\nend_header\n"
                                  "0 0 0\n1 0 0\n1 1 0\n0 1 0\n"
                                  "4 0 1 2 3\n");
    CHECK_THROWS_WITH_AS(read_mesh_ply(quad), Contains("PLY face is not a triangle"),
                         std::runtime_error);

    std::string oob = stage_file("io_oob.ply",
                                 "ply\nformat ascii 1.0\n"
                                 "element vertex 2\n"
                                 "property float x\nproperty float y\nproperty float z\n"
                                 "element face 1\n"
                                 "property list uchar int vertex_indices\nend_header\n"
                                 "0 0 0\n1 0 0\n"
                                 "3 0 1 2\n");
    CHECK_THROWS_WITH_AS(read_mesh_ply(oob), Contains("PLY face index out of range"),
                         std::runtime_error);
}

TEST_CASE("empty meshes produce valid files in both formats") {
    TriangleMesh empty;
    std::string obj = scratch_path("io_empty.obj");
    write_mesh(empty, obj);
    CHECK(read_binary(obj).empty());

    std::string ply = scratch_path("io_empty.ply");
    write_mesh(empty, ply);
    TriangleMesh back = read_mesh_ply(ply);
    CHECK(back.vertices.empty());
    CHECK(back.triangles.empty());
}

TEST_CASE("unknown mesh extension is rejected before any file is created") {
    TriangleMesh mesh;
    mesh.vertices = {{0.0, 0.0, 0.0}};
    CHECK_THROWS_WITH_AS(write_mesh(mesh, scratch_path("io_bad.stl")),
                         Contains("unsupported mesh format (use .obj or .ply)"),
                         std::runtime_error);
    std::ifstream probe(scratch_path("io_bad.stl"));
    CHECK_FALSE(probe.good());
}

TEST_CASE("six-column cloud writer round-trips samples through the text reader") {
    std::vector<PointSample> samples = {
        {{0.1, -0.2, 0.3}, {0.0, 0.0, 1.0}},
        {{1.0 / 3.0, 2.0 / 7.0, -5.0e-3}, {1.0, 0.0, 0.0}},
        {{-4.0, 4.0, 0.125}, {0.0, -1.0, 0.0}},
    };
    std::string path = scratch_path("io_cloud_roundtrip.txt");
    write_cloud_text(samples, path);
    CloudReadResult r = read_cloud(path, {});
    REQUIRE(r.samples.size() == samples.size());
    CHECK(r.rejected == 0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        // 17 significant digits reproduce every double exactly; the unit
        // axis-aligned normals renormalize to themselves bitwise.
        CHECK(same_vec(r.samples[i].p, samples[i].p));
        CHECK(same_vec(r.samples[i].v, samples[i].v));
    }
}
