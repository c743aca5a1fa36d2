#include "recon/surface.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "mc_table.hpp"

namespace recon {

ThresholdResult threshold(const ScalarGrid& u, double mu) {
    if (!(mu > 0.0 && mu < 1.0))
        throw std::invalid_argument("threshold: mu must lie strictly inside (0,1)");
    ThresholdResult r{ScalarGrid(u.frame), 0};
    for (std::size_t i = 0; i < u.data.size(); ++i) {
        const bool inside = u.data[i] > mu;
        r.binary.data[i] = inside ? 1.0 : 0.0;
        r.inside_count += inside;
    }
    return r;
}

ScalarGrid smooth_binary(const ScalarGrid& u_hat) { return box_filter(u_hat, 3); }

double select_isovalue(const ScalarGrid& u_tilde, const std::vector<PointSample>& samples) {
    if (samples.empty())
        throw std::invalid_argument("select_isovalue: empty sample list");
    double sum = 0.0;
    for (const PointSample& s : samples) sum += trilinear_sample(u_tilde, s.p);
    return sum / static_cast<double>(samples.size());
}

TriangleMesh marching_cubes(const ScalarGrid& u_tilde, double isovalue) {
    const GridFrame& frame = u_tilde.frame;
    const GridDims& d = frame.dims;
    const auto& table = detail::mc_case_table();

    TriangleMesh mesh;
    // Key: flat index of the edge's lower vertex * 3 + axis.
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;

    const std::size_t nx = d.nx;
    const std::size_t nxy = static_cast<std::size_t>(d.nx) * d.ny;
    const double* f = u_tilde.data.data();

    // Cell-corner offsets in flat index space, bit-wise corner numbering.
    const std::size_t corner_off[8] = {0,   1,        nx,       nx + 1,
                                       nxy, nxy + 1, nxy + nx, nxy + nx + 1};

    for (int z = 0; z + 1 < d.nz; ++z)
        for (int y = 0; y + 1 < d.ny; ++y) {
            std::size_t base = frame.index(0, y, z);
            for (int x = 0; x + 1 < d.nx; ++x, ++base) {
                int mask = 0;
                double fc[8];
                for (int c = 0; c < 8; ++c) {
                    fc[c] = f[base + corner_off[c]];
                    if (fc[c] > isovalue) mask |= 1 << c;
                }
                if (mask == 0 || mask == 255) continue;

                std::uint32_t ev[12];
                for (const auto& loop : table[mask].loops) {
                    for (std::uint8_t e : loop) {
                        const int c0 = detail::kEdgeCorners[e][0];
                        const int c1 = detail::kEdgeCorners[e][1];
                        const int axis = detail::edge_axis(e);
                        const std::uint64_t key =
                            static_cast<std::uint64_t>(base + corner_off[c0]) * 3 + axis;
                        auto it = edge_vertex.find(key);
                        if (it == edge_vertex.end()) {
                            const double t = (isovalue - fc[c0]) / (fc[c1] - fc[c0]);
                            const Vec3 p0 = frame.world(x + (c0 & 1), y + ((c0 >> 1) & 1),
                                                        z + ((c0 >> 2) & 1));
                            const Vec3 p1 = frame.world(x + (c1 & 1), y + ((c1 >> 1) & 1),
                                                        z + ((c1 >> 2) & 1));
                            const std::uint32_t idx =
                                static_cast<std::uint32_t>(mesh.vertices.size());
                            mesh.vertices.push_back(p0 + t * (p1 - p0));
                            it = edge_vertex.emplace(key, idx).first;
                        }
                        ev[e] = it->second;
                    }
                }
                for (const auto& t : table[mask].tris)
                    mesh.triangles.push_back({ev[t[0]], ev[t[1]], ev[t[2]]});
            }
        }
    return mesh;
}

}  // namespace recon
