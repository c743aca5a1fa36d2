#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

#include "recon/vec3.hpp"

namespace recon {

/// Vertex counts per axis of a uniform grid. Each axis needs at least two
/// vertices (one cell).
struct GridDims {
    int nx = 0;
    int ny = 0;
    int nz = 0;

    std::size_t vertex_count() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }
    bool operator==(const GridDims&) const = default;
};

/// Placement of a uniform grid in world space: origin = world position of
/// vertex (0,0,0), cubical cell spacing h, vertex counts.
struct GridFrame {
    Vec3 origin;
    double h = 1.0;
    GridDims dims;

    /// Flat index of vertex (x,y,z); storage is x-fastest lexicographic.
    std::size_t index(int x, int y, int z) const {
        assert(x >= 0 && x < dims.nx && y >= 0 && y < dims.ny && z >= 0 && z < dims.nz);
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims.nx) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims.ny) * static_cast<std::size_t>(z));
    }

    /// Inverse of index().
    std::array<int, 3> unindex(std::size_t i) const {
        assert(i < dims.vertex_count());
        const auto nx = static_cast<std::size_t>(dims.nx);
        const auto ny = static_cast<std::size_t>(dims.ny);
        return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny),
                static_cast<int>(i / (nx * ny))};
    }

    Vec3 world(int x, int y, int z) const {
        return {origin.x + h * x, origin.y + h * y, origin.z + h * z};
    }

    /// World point -> continuous grid coordinates (vertex units).
    Vec3 to_grid(const Vec3& p) const {
        return {(p.x - origin.x) / h, (p.y - origin.y) / h, (p.z - origin.z) / h};
    }

    /// True if p lies inside the grid volume (closed box).
    bool contains(const Vec3& p) const {
        const Vec3 g = to_grid(p);
        return g.x >= 0.0 && g.x <= dims.nx - 1 && g.y >= 0.0 && g.y <= dims.ny - 1 &&
               g.z >= 0.0 && g.z <= dims.nz - 1;
    }

    bool operator==(const GridFrame&) const = default;
};

/// Uniform scalar field, flat contiguous storage, index = x + nx*(y + ny*z).
struct ScalarGrid {
    GridFrame frame;
    std::vector<double> data;

    ScalarGrid() = default;
    explicit ScalarGrid(const GridFrame& f, double fill = 0.0)
        : frame(f), data(f.dims.vertex_count(), fill) {}

    double& at(int x, int y, int z) { return data[frame.index(x, y, z)]; }
    double at(int x, int y, int z) const { return data[frame.index(x, y, z)]; }
    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
};

/// Three co-located scalar fields (one per vector component).
struct VectorGrid {
    GridFrame frame;
    std::array<std::vector<double>, 3> comp;

    VectorGrid() = default;
    explicit VectorGrid(const GridFrame& f) : frame(f) {
        for (auto& c : comp) c.assign(f.dims.vertex_count(), 0.0);
    }
};

/// Multi-resolution frames, coarsest first. Finer levels satisfy
/// n_fine = 2*(n_coarse - 1) + 1 per axis so coarse vertices coincide with
/// every second fine vertex.
struct Pyramid {
    std::vector<GridFrame> levels;

    const GridFrame& finest() const { return levels.back(); }
    const GridFrame& coarsest() const { return levels.front(); }
    int level_count() const { return static_cast<int>(levels.size()); }
};

/// Builds a frame with cubical cells that contains the points' bounding box
/// padded by padding_fraction of each axis extent on both sides. The longest
/// padded axis gets exactly target_max_dim vertices; other axes get
/// ceil(extent/h) cells with the slack split evenly. Axes with zero extent get
/// two cells of width h centered on the points.
/// Throws std::invalid_argument on an empty point list or bad arguments.
GridFrame build_frame(const std::vector<Vec3>& positions, int target_max_dim,
                      double padding_fraction);

/// Builds a coarse-to-fine pyramid ending at (a possibly padded version of)
/// `finest`. Vertex counts are padded up to the nearest n with (n-1) divisible
/// by 2^(levels-1) so every level is valid; origin and world placement of
/// vertex (0,0,0) are preserved. Throws std::invalid_argument for levels < 1
/// or an unreasonably large level count.
Pyramid build_pyramid(const GridFrame& finest, int levels);

/// Trilinear interpolation of g at world point p, clamped to the grid volume.
double trilinear_sample(const ScalarGrid& g, const Vec3& p);

}  // namespace recon
