#include "recon/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "recon/parallel.hpp"

namespace recon {

namespace {

// n passes of the normalized 3-tap box along one axis, zero padding.
// Lines are independent, so the work parallelizes over them.
void filter_axis(std::vector<double>& data, const GridDims& d, int axis, int n) {
    const std::size_t nx = d.nx, ny = d.ny, nz = d.nz;
    const std::size_t len = axis == 0 ? nx : axis == 1 ? ny : nz;
    const std::size_t stride = axis == 0 ? 1 : axis == 1 ? nx : nx * ny;
    // Enumerate lines by the two orthogonal axes.
    const std::size_t la = axis == 0 ? ny : nx;
    const std::size_t lb = axis == 2 ? ny : nz;
    const std::size_t sa = axis == 0 ? nx : 1;
    const std::size_t sb = axis == 2 ? nx : nx * ny;

    parallel_for(0, la * lb, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> buf(len);
        for (std::size_t line = lo; line < hi; ++line) {
            const std::size_t base = (line % la) * sa + (line / la) * sb;
            for (int pass = 0; pass < n; ++pass) {
                double* p = data.data() + base;
                if (pass == 0) {
                    for (std::size_t i = 0; i < len; ++i) buf[i] = p[i * stride];
                }
                const double third = 1.0 / 3.0;
                double prev = 0.0;
                for (std::size_t i = 0; i < len; ++i) {
                    const double cur = buf[i];
                    const double next = i + 1 < len ? buf[i + 1] : 0.0;
                    const double out = (prev + cur + next) * third;
                    p[i * stride] = out;
                    prev = cur;
                }
                if (pass + 1 < n) {
                    for (std::size_t i = 0; i < len; ++i) buf[i] = p[i * stride];
                }
            }
        }
    });
}

void zero_outer_layers(std::vector<double>& data, const GridDims& d, int layers) {
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                const bool outer = x < layers || x >= d.nx - layers || y < layers ||
                                   y >= d.ny - layers || z < layers || z >= d.nz - layers;
                if (outer)
                    data[static_cast<std::size_t>(x) +
                         static_cast<std::size_t>(d.nx) *
                             (static_cast<std::size_t>(y) +
                              static_cast<std::size_t>(d.ny) * static_cast<std::size_t>(z))] =
                        0.0;
            }
}

}  // namespace

VectorGrid splat(const std::vector<PointSample>& samples, const GridFrame& frame) {
    VectorGrid out(frame);
    const GridDims& d = frame.dims;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const Vec3 g = frame.to_grid(samples[s].p);
        if (!(g.x >= 0.0 && g.x <= d.nx - 1 && g.y >= 0.0 && g.y <= d.ny - 1 && g.z >= 0.0 &&
              g.z <= d.nz - 1))
            throw std::invalid_argument("splat: sample " + std::to_string(s) +
                                        " lies outside the grid volume");
        const int x0 = std::min(static_cast<int>(g.x), d.nx - 2);
        const int y0 = std::min(static_cast<int>(g.y), d.ny - 2);
        const int z0 = std::min(static_cast<int>(g.z), d.nz - 2);
        const double fx = g.x - x0, fy = g.y - y0, fz = g.z - z0;

        const double wx[2] = {1.0 - fx, fx};
        const double wy[2] = {1.0 - fy, fy};
        const double wz[2] = {1.0 - fz, fz};
        const double vs[3] = {samples[s].v.x, samples[s].v.y, samples[s].v.z};
        for (int dz = 0; dz < 2; ++dz)
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const double w = wx[dx] * wy[dy] * wz[dz];
                    const std::size_t i = frame.index(x0 + dx, y0 + dy, z0 + dz);
                    for (int c = 0; c < 3; ++c) out.comp[c][i] += w * vs[c];
                }
    }
    return out;
}

ScalarGrid box_filter(const ScalarGrid& g, int n) {
    if (n < 1) throw std::invalid_argument("box_filter: n must be >= 1");
    ScalarGrid out = g;
    for (int axis = 0; axis < 3; ++axis) filter_axis(out.data, out.frame.dims, axis, n);
    return out;
}

VectorGrid box_smooth(const VectorGrid& field, int n) {
    if (n < 1) throw std::invalid_argument("box_smooth: n must be >= 1");
    VectorGrid out = field;
    for (auto& c : out.comp) {
        for (int axis = 0; axis < 3; ++axis) filter_axis(c, out.frame.dims, axis, n);
        zero_outer_layers(c, out.frame.dims, 2);
    }
    return out;
}

ScalarGrid divergence(const VectorGrid& field) {
    const GridFrame& f = field.frame;
    const GridDims& d = f.dims;
    ScalarGrid div(f, 0.0);
    const double inv2h = 1.0 / (2.0 * f.h);
    const std::size_t nx = d.nx, nxy = static_cast<std::size_t>(d.nx) * d.ny;
    const double* v0 = field.comp[0].data();
    const double* v1 = field.comp[1].data();
    const double* v2 = field.comp[2].data();

    parallel_for(1, static_cast<std::size_t>(d.nz - 1), [&](std::size_t zlo, std::size_t zhi) {
        for (std::size_t z = zlo; z < zhi; ++z)
            for (std::size_t y = 1; y + 1 < static_cast<std::size_t>(d.ny); ++y) {
                std::size_t i = f.index(1, static_cast<int>(y), static_cast<int>(z));
                for (std::size_t x = 1; x + 1 < static_cast<std::size_t>(d.nx); ++x, ++i) {
                    div.data[i] = ((v0[i + 1] - v0[i - 1]) + (v1[i + nx] - v1[i - nx]) +
                                   (v2[i + nxy] - v2[i - nxy])) *
                                  inv2h;
                }
            }
    });
    return div;
}

}  // namespace recon
