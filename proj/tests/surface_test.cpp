#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "recon/field.hpp"
#include "recon/grid.hpp"
#include "recon/mesh_metrics.hpp"
#include "recon/surface.hpp"
#include "test_util.hpp"

using namespace recon;
using testutil::make_frame;

namespace {

// Binary ball indicator centered in the grid.
ScalarGrid ball_indicator(const GridFrame& f, double radius_cells) {
    ScalarGrid u(f);
    const double cx = (f.dims.nx - 1) / 2.0;
    const double cy = (f.dims.ny - 1) / 2.0;
    const double cz = (f.dims.nz - 1) / 2.0;
    for (int z = 0; z < f.dims.nz; ++z)
        for (int y = 0; y < f.dims.ny; ++y)
            for (int x = 0; x < f.dims.nx; ++x) {
                const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy) + (z - cz) * (z - cz);
                u.data[f.index(x, y, z)] = d2 <= radius_cells * radius_cells ? 1.0 : 0.0;
            }
    return u;
}

double triangle_area(const TriangleMesh& m, std::size_t t) {
    const Vec3& a = m.vertices[m.triangles[t][0]];
    const Vec3& b = m.vertices[m.triangles[t][1]];
    const Vec3& c = m.vertices[m.triangles[t][2]];
    const Vec3 e0{b.x - a.x, b.y - a.y, b.z - a.z};
    const Vec3 e1{c.x - a.x, c.y - a.y, c.z - a.z};
    const Vec3 n{e0.y * e1.z - e0.z * e1.y, e0.z * e1.x - e0.x * e1.z,
                 e0.x * e1.y - e0.y * e1.x};
    return 0.5 * std::sqrt(n.x * n.x + n.y * n.y + n.z * n.z);
}

}  // namespace

TEST_CASE("threshold: constant fields land entirely on one side") {
    GridFrame f = make_frame(4, 5, 6);
    ScalarGrid u(f);
    for (double& x : u.data) x = 0.7;
    ThresholdResult hi = threshold(u, 0.5);
    CHECK(hi.inside_count == u.data.size());
    for (double x : hi.binary.data) CHECK(x == 1.0);
    ThresholdResult lo = threshold(u, 0.9);
    CHECK(lo.inside_count == 0);
    for (double x : lo.binary.data) CHECK(x == 0.0);
}

TEST_CASE("threshold: inside counts shrink as the level rises") {
    GridFrame f = make_frame(8, 8, 8);
    testutil::Rng rng(21);
    ScalarGrid u(f);
    for (double& x : u.data) x = rng.uniform(0.0, 1.0);
    std::size_t prev = u.data.size() + 1;
    for (double mu : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        ThresholdResult th = threshold(u, mu);
        CHECK(th.inside_count <= prev);
        prev = th.inside_count;
        for (double x : th.binary.data) CHECK((x == 0.0 || x == 1.0));
    }
}

TEST_CASE("threshold: rejects levels outside the open unit interval") {
    ScalarGrid u(make_frame(3, 3, 3));
    CHECK_THROWS_AS(threshold(u, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(threshold(u, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(threshold(u, -2.0), std::invalid_argument);
}

TEST_CASE("binary smoothing: zero stays zero, deep interior stays one") {
    GridFrame f = make_frame(17, 17, 17);
    ScalarGrid zero(f);
    ScalarGrid sz = smooth_binary(zero);
    for (double x : sz.data) CHECK(x == 0.0);

    ScalarGrid u(f);
    for (int z = 3; z <= 13; ++z)
        for (int y = 3; y <= 13; ++y)
            for (int x = 3; x <= 13; ++x) u.data[f.index(x, y, z)] = 1.0;
    ScalarGrid s = smooth_binary(u);
    for (double x : s.data) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0 + 1e-15);
    }
    // kernel support is +-3 vertices, so depth >= 4 inside the block is untouched
    for (int z = 7; z <= 9; ++z)
        for (int y = 7; y <= 9; ++y)
            for (int x = 7; x <= 9; ++x)
                CHECK(s.data[f.index(x, y, z)] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("binary smoothing: half-space profile follows the 1D kernel sums") {
    GridFrame f = make_frame(17, 17, 17);
    ScalarGrid u(f);
    for (int z = 0; z < 17; ++z)
        for (int y = 0; y < 17; ++y)
            for (int x = 0; x < 8; ++x) u.data[f.index(x, y, z)] = 1.0;
    ScalarGrid s = smooth_binary(u);

    // independently build the 7-tap kernel (three-fold self-convolution of
    // the 3-tap box) and its running sums across the step at x = 8
    const double k[7] = {1 / 27.0, 3 / 27.0, 6 / 27.0, 7 / 27.0, 6 / 27.0, 3 / 27.0, 1 / 27.0};
    for (int x = 3; x <= 13; ++x) {
        double expect = 0.0;
        for (int t = -3; t <= 3; ++t)
            if (x + t < 8) expect += k[t + 3];
        // rows away from the y/z rims: the transverse factors are exactly 1
        CHECK(s.data[f.index(x, 8, 8)] == doctest::Approx(expect).epsilon(1e-13));
        CHECK(s.data[f.index(x, 5, 10)] == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("isovalue selection averages interpolated field values") {
    GridFrame f = make_frame(5, 5, 5);
    ScalarGrid u(f);
    for (double& x : u.data) x = 0.37;
    std::vector<PointSample> samples{{{1.2, 2.7, 3.1}, {1, 0, 0}}, {{0.5, 0.5, 0.5}, {1, 0, 0}}};
    CHECK(select_isovalue(u, samples) == doctest::Approx(0.37).epsilon(1e-14));

    testutil::Rng rng(22);
    for (double& x : u.data) x = rng.uniform(0.0, 1.0);
    std::vector<PointSample> on_vertices{{{1.0, 2.0, 3.0}, {1, 0, 0}},
                                         {{4.0, 0.0, 2.0}, {1, 0, 0}}};
    const double expect =
        0.5 * (u.data[f.index(1, 2, 3)] + u.data[f.index(4, 0, 2)]);
    CHECK(select_isovalue(u, on_vertices) == doctest::Approx(expect).epsilon(1e-14));

    CHECK_THROWS_AS(select_isovalue(u, {}), std::invalid_argument);
}

TEST_CASE("contouring: a field under the isovalue produces no geometry") {
    ScalarGrid u(make_frame(6, 6, 6));
    TriangleMesh mesh = marching_cubes(u, 0.5);
    CHECK(mesh.vertices.empty());
    CHECK(mesh.triangles.empty());
}

TEST_CASE("contouring: one corner above the level cuts a single triangle") {
    GridFrame f = make_frame(2, 2, 2);
    ScalarGrid u(f);
    u.data[f.index(0, 0, 0)] = 1.0;
    TriangleMesh mesh = marching_cubes(u, 0.5);
    REQUIRE(mesh.triangles.size() == 1);
    CHECK(mesh.vertices.size() == 3);
    // vertices sit halfway along the three incident edges
    for (const Vec3& v : mesh.vertices) {
        const double coords[3] = {v.x, v.y, v.z};
        int halves = 0, zeros = 0;
        for (double c : coords) {
            if (c == doctest::Approx(0.5).epsilon(1e-12)) ++halves;
            if (c == doctest::Approx(0.0).epsilon(1e-12)) ++zeros;
        }
        CHECK(halves == 1);
        CHECK(zeros == 2);
    }
}

TEST_CASE("contouring: smoothed ball gives one closed genus-zero surface") {
    GridFrame f = make_frame(21, 21, 21, 0.5, {-1.0, 2.0, 0.0});
    ScalarGrid u = ball_indicator(f, 6.0);
    ScalarGrid s = smooth_binary(u);
    const double iso = 0.5;
    TriangleMesh mesh = marching_cubes(s, iso);
    REQUIRE(!mesh.triangles.empty());

    MeshTopology topo = analyze_topology(mesh);
    CHECK(topo.watertight);
    CHECK(topo.components == 1);
    CHECK(topo.boundary_edges == 0);
    CHECK(topo.nonmanifold_edges == 0);
    CHECK(topo.genus() == 0);
    CHECK(topo.euler == 2);

    // no degenerate slivers
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        CHECK(triangle_area(mesh, t) > 1e-12 * f.h * f.h);

    // every vertex reproduces the isovalue under trilinear sampling
    for (const Vec3& v : mesh.vertices)
        CHECK(trilinear_sample(s, v) == doctest::Approx(iso).epsilon(1e-6));

    // normals point outward, toward smaller field values
    OrientationCheck orient = check_outward_orientation(mesh, s, iso);
    CHECK(orient.tested == mesh.triangles.size());
    CHECK(orient.violations == 0);
}

TEST_CASE("contouring: welded vertices are exact, not epsilon-merged") {
    GridFrame f = make_frame(13, 13, 13);
    ScalarGrid s = smooth_binary(ball_indicator(f, 3.5));
    TriangleMesh mesh = marching_cubes(s, 0.4);
    REQUIRE(!mesh.vertices.empty());
    std::map<std::tuple<double, double, double>, int> seen;
    for (const Vec3& v : mesh.vertices) ++seen[{v.x, v.y, v.z}];
    CHECK(seen.size() == mesh.vertices.size());  // exact duplicates would collide
    for (const auto& tri : mesh.triangles) {
        CHECK(tri[0] < mesh.vertices.size());
        CHECK(tri[1] < mesh.vertices.size());
        CHECK(tri[2] < mesh.vertices.size());
    }
}

TEST_CASE("contouring: random interior fields always close up") {
    testutil::Rng rng(23);
    GridFrame f = make_frame(8, 8, 8);
    for (int trial = 0; trial < 150; ++trial) {
        ScalarGrid u(f);
        for (int z = 0; z < 8; ++z)
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) {
                    const bool rim = x == 0 || y == 0 || z == 0 || x == 7 || y == 7 || z == 7;
                    // strictly off the isovalue so no degenerate crossings arise
                    u.data[f.index(x, y, z)] = rim ? 0.0 : 0.05 + 0.9 * rng.uniform();
                }
        TriangleMesh mesh = marching_cubes(u, 0.5);
        MeshTopology topo = analyze_topology(mesh);
        CHECK(topo.boundary_edges == 0);
        CHECK(topo.nonmanifold_edges == 0);
        if (!mesh.triangles.empty()) CHECK(topo.watertight);
    }
}

TEST_CASE("contouring: isovalue position moves the surface radius") {
    GridFrame f = make_frame(17, 17, 17);
    ScalarGrid s = smooth_binary(ball_indicator(f, 5.0));
    TriangleMesh tight = marching_cubes(s, 0.75);
    TriangleMesh loose = marching_cubes(s, 0.25);
    REQUIRE(!tight.vertices.empty());
    REQUIRE(!loose.vertices.empty());
    auto mean_radius = [&](const TriangleMesh& m) {
        double acc = 0.0;
        for (const Vec3& v : m.vertices) {
            const double dx = v.x - 8.0, dy = v.y - 8.0, dz = v.z - 8.0;
            acc += std::sqrt(dx * dx + dy * dy + dz * dz);
        }
        return acc / m.vertices.size();
    };
    CHECK(mean_radius(tight) < mean_radius(loose));
}
