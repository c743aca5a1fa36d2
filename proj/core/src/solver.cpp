#include "recon/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "recon/parallel.hpp"

namespace recon {

namespace {

constexpr double kChangeThreshold = 1e-9;  // per-vertex activity cutoff
constexpr int kBlock = 8;                  // active-block edge length (vertices)
constexpr int kFullSweepPeriod = 16;       // guard full sweep cadence

struct BlockLayout {
    int bx = 1, by = 1, bz = 1;
    std::size_t count() const {
        return static_cast<std::size_t>(bx) * by * static_cast<std::size_t>(bz);
    }
    std::size_t at(int x, int y, int z) const {
        return static_cast<std::size_t>(x / kBlock) +
               static_cast<std::size_t>(bx) *
                   (static_cast<std::size_t>(y / kBlock) +
                    static_cast<std::size_t>(by) * static_cast<std::size_t>(z / kBlock));
    }
};

BlockLayout make_layout(const GridDims& d) {
    return {(d.nx + kBlock - 1) / kBlock, (d.ny + kBlock - 1) / kBlock,
            (d.nz + kBlock - 1) / kBlock};
}

std::vector<std::uint8_t> dilate_blocks(const std::vector<std::uint8_t>& m,
                                        const BlockLayout& bl) {
    std::vector<std::uint8_t> out(m.size(), 0);
    for (int z = 0; z < bl.bz; ++z)
        for (int y = 0; y < bl.by; ++y)
            for (int x = 0; x < bl.bx; ++x) {
                std::uint8_t v = 0;
                for (int dz = -1; dz <= 1 && !v; ++dz)
                    for (int dy = -1; dy <= 1 && !v; ++dy)
                        for (int dx = -1; dx <= 1 && !v; ++dx) {
                            const int nx = x + dx, ny = y + dy, nz = z + dz;
                            if (nx < 0 || ny < 0 || nz < 0 || nx >= bl.bx || ny >= bl.by ||
                                nz >= bl.bz)
                                continue;
                            v |= m[static_cast<std::size_t>(nx) +
                                   static_cast<std::size_t>(bl.bx) *
                                       (static_cast<std::size_t>(ny) +
                                        static_cast<std::size_t>(bl.by) *
                                            static_cast<std::size_t>(nz))];
                        }
                out[static_cast<std::size_t>(x) +
                    static_cast<std::size_t>(bl.bx) *
                        (static_cast<std::size_t>(y) +
                         static_cast<std::size_t>(bl.by) * static_cast<std::size_t>(z))] = v;
            }
    return out;
}

std::vector<std::uint8_t> divergence_blocks(const ScalarGrid& div, const BlockLayout& bl) {
    std::vector<std::uint8_t> occ(bl.count(), 0);
    const GridDims& d = div.frame.dims;
    std::size_t i = 0;
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x, ++i)
                if (div.data[i] != 0.0) occ[bl.at(x, y, z)] = 1;
    return dilate_blocks(occ, bl);
}

// One lexicographic SOR pass. `active` (nullable) skips blocks; `changed`
// (nullable) records blocks whose vertices moved more than the threshold.
void sweep_impl(ScalarGrid& u, const ScalarGrid& g, const ScalarGrid& div,
                const SolverConfig& cfg, const BlockLayout& bl,
                const std::vector<std::uint8_t>* active, std::vector<std::uint8_t>* changed) {
    const GridDims& d = u.frame.dims;
    const std::size_t nx = d.nx;
    const std::size_t nxy = static_cast<std::size_t>(d.nx) * d.ny;
    double* uu = u.data.data();
    const double* gg = g.data.data();
    const double* dd = div.data.data();

    const bool dirichlet = cfg.boundary == Boundary::DirichletZero;
    const double c = cfg.mode == SolveMode::Poisson ? 2.0 * cfg.lambda : cfg.lambda;
    const double w = cfg.omega;

    const int x0 = dirichlet ? 1 : 0, x1 = dirichlet ? d.nx - 1 : d.nx;
    const int y0 = dirichlet ? 1 : 0, y1 = dirichlet ? d.ny - 1 : d.ny;
    const int z0 = dirichlet ? 1 : 0, z1 = dirichlet ? d.nz - 1 : d.nz;

    for (int z = z0; z < z1; ++z)
        for (int y = y0; y < y1; ++y) {
            std::size_t i = u.frame.index(x0, y, z);
            for (int x = x0; x < x1; ++x, ++i) {
                if (active && !(*active)[bl.at(x, y, z)]) continue;
                const double gi = gg[i];
                double num = 0.0, den = 0.0;
                if (x > 0)        { const double gij = 0.5 * (gi + gg[i - 1]);   num += gij * uu[i - 1];   den += gij; }
                if (x + 1 < d.nx) { const double gij = 0.5 * (gi + gg[i + 1]);   num += gij * uu[i + 1];   den += gij; }
                if (y > 0)        { const double gij = 0.5 * (gi + gg[i - nx]);  num += gij * uu[i - nx];  den += gij; }
                if (y + 1 < d.ny) { const double gij = 0.5 * (gi + gg[i + nx]);  num += gij * uu[i + nx];  den += gij; }
                if (z > 0)        { const double gij = 0.5 * (gi + gg[i - nxy]); num += gij * uu[i - nxy]; den += gij; }
                if (z + 1 < d.nz) { const double gij = 0.5 * (gi + gg[i + nxy]); num += gij * uu[i + nxy]; den += gij; }

                const double old = uu[i];
                double fresh = (1.0 - w) * old + w * (c * num + dd[i]) / (c * den);
                fresh = std::clamp(fresh, 0.0, 1.0);
                assert(fresh >= 0.0 && fresh <= 1.0);
                uu[i] = fresh;
                if (changed && std::abs(fresh - old) > kChangeThreshold)
                    (*changed)[bl.at(x, y, z)] = 1;
            }
        }
}

void check_common(const ScalarGrid& div, const SolverConfig& cfg) {
    if (!(cfg.omega > 0.0 && cfg.omega < 2.0))
        throw std::invalid_argument("solver: omega must lie in (0,2)");
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("solver: lambda must be positive");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("solver: epsilon must be positive");
    if (cfg.max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
    if (div.data.size() != div.frame.dims.vertex_count())
        throw std::invalid_argument("solver: malformed divergence grid");
}

}  // namespace

double energy(const ScalarGrid& u, const ScalarGrid& div, double lambda, SolveMode mode) {
    const GridDims& d = u.frame.dims;
    const std::size_t nx = d.nx;
    const std::size_t nxy = static_cast<std::size_t>(d.nx) * d.ny;
    const double* uu = u.data.data();
    const double* dd = div.data.data();

    // Per-slice partials summed in z order: the reduction is identical for
    // every thread count.
    std::vector<double> partial(d.nz, 0.0);
    parallel_for(0, static_cast<std::size_t>(d.nz), [&](std::size_t zlo, std::size_t zhi) {
        for (std::size_t z = zlo; z < zhi; ++z) {
            double acc = 0.0;
            std::size_t i = z * nxy;
            for (int y = 0; y < d.ny; ++y)
                for (int x = 0; x < d.nx; ++x, ++i) {
                    const double dx = x + 1 < d.nx ? uu[i + 1] - uu[i] : 0.0;
                    const double dy = y + 1 < d.ny ? uu[i + nx] - uu[i] : 0.0;
                    const double dz = z + 1 < static_cast<std::size_t>(d.nz)
                                          ? uu[i + nxy] - uu[i]
                                          : 0.0;
                    const double g2 = dx * dx + dy * dy + dz * dz;
                    const double phi = mode == SolveMode::TV ? std::sqrt(g2) : g2;
                    acc += lambda * phi - dd[i] * uu[i];
                }
            partial[z] = acc;
        }
    });

    double e = 0.0;
    for (double p : partial) e += p;
    return e;
}

ScalarGrid update_diffusivity(const ScalarGrid& u, double epsilon) {
    const GridDims& d = u.frame.dims;
    const std::size_t nx = d.nx;
    const std::size_t nxy = static_cast<std::size_t>(d.nx) * d.ny;
    const double* uu = u.data.data();
    ScalarGrid g(u.frame);
    double* gg = g.data.data();
    const double e2 = epsilon * epsilon;

    parallel_for(0, static_cast<std::size_t>(d.nz), [&](std::size_t zlo, std::size_t zhi) {
        for (std::size_t z = zlo; z < zhi; ++z) {
            std::size_t i = z * nxy;
            for (int y = 0; y < d.ny; ++y)
                for (int x = 0; x < d.nx; ++x, ++i) {
                    const double dx = x + 1 < d.nx ? uu[i + 1] - uu[i] : 0.0;
                    const double dy = y + 1 < d.ny ? uu[i + nx] - uu[i] : 0.0;
                    const double dz = z + 1 < static_cast<std::size_t>(d.nz)
                                          ? uu[i + nxy] - uu[i]
                                          : 0.0;
                    gg[i] = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz + e2);
                }
        }
    });
    return g;
}

void sor_sweep(ScalarGrid& u, const ScalarGrid& g, const ScalarGrid& div,
               const SolverConfig& cfg) {
    check_common(div, cfg);
    const BlockLayout bl = make_layout(u.frame.dims);
    sweep_impl(u, g, div, cfg, bl, nullptr, nullptr);
}

std::pair<ScalarGrid, SolveReport> solve_level(const ScalarGrid& div, const ScalarGrid& u0,
                                               const SolverConfig& cfg) {
    check_common(div, cfg);
    if (!(u0.frame == div.frame))
        throw std::invalid_argument("solve_level: u0 and div frames differ");

    ScalarGrid u = u0;
    SolveReport rep;
    const bool tv = cfg.mode == SolveMode::TV;
    const int stride = tv ? std::max(1, cfg.g_update_stride) : 1;

    const BlockLayout bl = make_layout(u.frame.dims);
    const std::vector<std::uint8_t> static_active = divergence_blocks(div, bl);
    std::vector<std::uint8_t> changed(bl.count(), 1);
    std::vector<std::uint8_t> active(bl.count(), 1);

    ScalarGrid g(u.frame, 1.0);  // stays all-ones in Poisson mode

    double e_prev = energy(u, div, cfg.lambda, cfg.mode);
    rep.energy_trace.emplace_back(0, e_prev);

    int iter = 0;
    bool converged = false;
    while (iter < cfg.max_iters && !converged) {
        if (tv && iter % stride == 0) g = update_diffusivity(u, cfg.epsilon);

        if (iter % kFullSweepPeriod == 0) {
            std::fill(active.begin(), active.end(), 1);
        } else {
            active = dilate_blocks(changed, bl);
            for (std::size_t b = 0; b < active.size(); ++b) active[b] |= static_active[b];
        }
        std::fill(changed.begin(), changed.end(), 0);
        sweep_impl(u, g, div, cfg, bl, &active, &changed);
        ++iter;

        if (iter % stride == 0) {
            const double e = energy(u, div, cfg.lambda, cfg.mode);
            rep.energy_trace.emplace_back(iter, e);
            if (std::abs(e - e_prev) / std::max(std::abs(e), 1e-30) < cfg.rel_energy_tol)
                converged = true;
            e_prev = e;
        }
    }

    rep.iterations_per_level.push_back(iter);
    rep.final_energy = e_prev;
    rep.converged = converged;
    return {std::move(u), std::move(rep)};
}

std::pair<ScalarGrid, SolveReport> solve_multires(const ScalarGrid& div_fine,
                                                  const Pyramid& pyramid,
                                                  const SolverConfig& cfg) {
    if (pyramid.levels.empty()) throw std::invalid_argument("solve_multires: empty pyramid");
    if (!(div_fine.frame == pyramid.finest()))
        throw std::invalid_argument("solve_multires: div frame does not match finest level");

    const int levels = pyramid.level_count();
    std::vector<ScalarGrid> divs(levels);
    divs[levels - 1] = div_fine;
    for (int l = levels - 2; l >= 0; --l)
        divs[l] = downsample_sum(divs[l + 1], pyramid.levels[l]);

    ScalarGrid u(pyramid.levels[0], 0.0);
    SolveReport all;
    int offset = 0;
    for (int l = 0; l < levels; ++l) {
        if (l > 0) u = upsample(u, pyramid.levels[l]);
        auto [ul, rep] = solve_level(divs[l], u, cfg);
        u = std::move(ul);
        all.iterations_per_level.push_back(rep.iterations_per_level.front());
        for (const auto& [it, e] : rep.energy_trace)
            all.energy_trace.emplace_back(it + offset, e);
        offset += rep.iterations_per_level.front();
        all.final_energy = rep.final_energy;
        all.converged = rep.converged;
    }
    return {std::move(u), std::move(all)};
}

ScalarGrid downsample_sum(const ScalarGrid& fine, const GridFrame& coarse) {
    const GridDims& df = fine.frame.dims;
    const GridDims& dc = coarse.dims;
    assert(df.nx == 2 * (dc.nx - 1) + 1 && df.ny == 2 * (dc.ny - 1) + 1 &&
           df.nz == 2 * (dc.nz - 1) + 1);
    ScalarGrid out(coarse, 0.0);
    std::size_t i = 0;
    for (int z = 0; z < df.nz; ++z)
        for (int y = 0; y < df.ny; ++y)
            for (int x = 0; x < df.nx; ++x, ++i)
                out.data[coarse.index(x >> 1, y >> 1, z >> 1)] += fine.data[i];
    return out;
}

ScalarGrid upsample(const ScalarGrid& coarse, const GridFrame& fine) {
    const GridDims& df = fine.dims;
    const GridDims& dc = coarse.frame.dims;
    assert(df.nx == 2 * (dc.nx - 1) + 1 && df.ny == 2 * (dc.ny - 1) + 1 &&
           df.nz == 2 * (dc.nz - 1) + 1);
    ScalarGrid out(fine, 0.0);
    const std::size_t nxy = static_cast<std::size_t>(df.nx) * df.ny;

    parallel_for(0, static_cast<std::size_t>(df.nz), [&](std::size_t zlo, std::size_t zhi) {
        for (std::size_t z = zlo; z < zhi; ++z) {
            const int cz = static_cast<int>(z) >> 1, oz = static_cast<int>(z) & 1;
            std::size_t i = z * nxy;
            for (int y = 0; y < df.ny; ++y) {
                const int cy = y >> 1, oy = y & 1;
                for (int x = 0; x < df.nx; ++x, ++i) {
                    const int cx = x >> 1, ox = x & 1;
                    double acc = 0.0;
                    const double wgt = 1.0 / ((ox + 1) * (oy + 1) * (oz + 1));
                    for (int az = 0; az <= oz; ++az)
                        for (int ay = 0; ay <= oy; ++ay)
                            for (int ax = 0; ax <= ox; ++ax)
                                acc += coarse.at(cx + ax, cy + ay, cz + az);
                    out.data[i] = acc * wgt;
                }
            }
        }
    });
    return out;
}

double poisson_residual_inf(const ScalarGrid& u, const ScalarGrid& div, double lambda) {
    const GridDims& d = u.frame.dims;
    const std::size_t nx = d.nx;
    const std::size_t nxy = static_cast<std::size_t>(d.nx) * d.ny;
    const double* uu = u.data.data();
    double worst = 0.0;
    for (int z = 1; z + 1 < d.nz; ++z)
        for (int y = 1; y + 1 < d.ny; ++y) {
            std::size_t i = u.frame.index(1, y, z);
            for (int x = 1; x + 1 < d.nx; ++x, ++i) {
                if (!(uu[i] > 0.0 && uu[i] < 1.0)) continue;
                const double lap = uu[i - 1] + uu[i + 1] + uu[i - nx] + uu[i + nx] +
                                   uu[i - nxy] + uu[i + nxy] - 6.0 * uu[i];
                worst = std::max(worst, std::abs(2.0 * lambda * lap + div.data[i]));
            }
        }
    return worst;
}

}  // namespace recon
