#include "recon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace recon {

GridFrame build_frame(const std::vector<Vec3>& positions, int target_max_dim,
                      double padding_fraction) {
    if (positions.empty()) throw std::invalid_argument("build_frame: empty point list");
    if (target_max_dim < 2)
        throw std::invalid_argument("build_frame: target_max_dim must be >= 2");
    if (padding_fraction < 0.0)
        throw std::invalid_argument("build_frame: padding_fraction must be >= 0");

    Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max()};
    Vec3 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
            std::numeric_limits<double>::lowest()};
    for (const Vec3& p : positions) {
        lo.x = std::min(lo.x, p.x); hi.x = std::max(hi.x, p.x);
        lo.y = std::min(lo.y, p.y); hi.y = std::max(hi.y, p.y);
        lo.z = std::min(lo.z, p.z); hi.z = std::max(hi.z, p.z);
    }

    double ext[3], mid[3];
    const double elo[3] = {lo.x, lo.y, lo.z};
    const double ehi[3] = {hi.x, hi.y, hi.z};
    for (int a = 0; a < 3; ++a) {
        const double pad = padding_fraction * (ehi[a] - elo[a]);
        ext[a] = (ehi[a] - elo[a]) + 2.0 * pad;
        mid[a] = 0.5 * (elo[a] + ehi[a]);
    }

    const double max_ext = std::max({ext[0], ext[1], ext[2]});
    // All points coincident: no scale to derive h from, fall back to unit cells.
    const double h = max_ext > 0.0 ? max_ext / (target_max_dim - 1) : 1.0;

    int n[3];
    double org[3];
    for (int a = 0; a < 3; ++a) {
        int cells;
        if (ext[a] == 0.0) {
            cells = 2;  // degenerate axis: two cells centered on the points
        } else if (ext[a] == max_ext) {
            cells = target_max_dim - 1;  // exact fit on the longest axis
        } else {
            cells = static_cast<int>(std::ceil(ext[a] / h - 1e-12));
            cells = std::max(cells, 1);
        }
        n[a] = cells + 1;
        org[a] = mid[a] - 0.5 * cells * h;
    }

    GridFrame frame;
    frame.origin = {org[0], org[1], org[2]};
    frame.h = h;
    frame.dims = {n[0], n[1], n[2]};
    return frame;
}

Pyramid build_pyramid(const GridFrame& finest, int levels) {
    if (levels < 1) throw std::invalid_argument("build_pyramid: levels must be >= 1");
    if (levels > 16)
        throw std::invalid_argument("build_pyramid: levels > 16 is not a sensible pyramid");

    const int step = 1 << (levels - 1);

    GridFrame padded = finest;
    int* nn[3] = {&padded.dims.nx, &padded.dims.ny, &padded.dims.nz};
    for (int a = 0; a < 3; ++a) {
        int n = *nn[a];
        // Smallest n' >= n with (n'-1) divisible by 2^(levels-1) and a coarsest
        // level of at least 2 vertices.
        if (n < step + 1) n = step + 1;
        const int rem = (n - 1) % step;
        if (rem != 0) n += step - rem;
        *nn[a] = n;
    }

    Pyramid pyr;
    pyr.levels.resize(levels);
    pyr.levels[levels - 1] = padded;
    for (int l = levels - 2; l >= 0; --l) {
        const GridFrame& fine = pyr.levels[l + 1];
        GridFrame coarse = fine;
        coarse.h = 2.0 * fine.h;
        coarse.dims = {(fine.dims.nx - 1) / 2 + 1, (fine.dims.ny - 1) / 2 + 1,
                       (fine.dims.nz - 1) / 2 + 1};
        pyr.levels[l] = coarse;
    }
    return pyr;
}

double trilinear_sample(const ScalarGrid& g, const Vec3& p) {
    const GridDims& d = g.frame.dims;
    Vec3 q = g.frame.to_grid(p);
    q.x = std::clamp(q.x, 0.0, static_cast<double>(d.nx - 1));
    q.y = std::clamp(q.y, 0.0, static_cast<double>(d.ny - 1));
    q.z = std::clamp(q.z, 0.0, static_cast<double>(d.nz - 1));

    const int x0 = std::min(static_cast<int>(q.x), d.nx - 2);
    const int y0 = std::min(static_cast<int>(q.y), d.ny - 2);
    const int z0 = std::min(static_cast<int>(q.z), d.nz - 2);
    const double fx = q.x - x0, fy = q.y - y0, fz = q.z - z0;

    const double c000 = g.at(x0, y0, z0), c100 = g.at(x0 + 1, y0, z0);
    const double c010 = g.at(x0, y0 + 1, z0), c110 = g.at(x0 + 1, y0 + 1, z0);
    const double c001 = g.at(x0, y0, z0 + 1), c101 = g.at(x0 + 1, y0, z0 + 1);
    const double c011 = g.at(x0, y0 + 1, z0 + 1), c111 = g.at(x0 + 1, y0 + 1, z0 + 1);

    const double c00 = c000 + fx * (c100 - c000);
    const double c10 = c010 + fx * (c110 - c010);
    const double c01 = c001 + fx * (c101 - c001);
    const double c11 = c011 + fx * (c111 - c011);
    const double c0 = c00 + fy * (c10 - c00);
    const double c1 = c01 + fy * (c11 - c01);
    return c0 + fz * (c1 - c0);
}

}  // namespace recon
