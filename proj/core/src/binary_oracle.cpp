#include "recon/binary_min.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace recon {

BinaryMinResult exhaustive_binary_min(const ScalarGrid& div, double lambda,
                                      Boundary boundary) {
    const GridDims& d = div.frame.dims;
    std::vector<std::size_t> free_vertices;
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                if (boundary == Boundary::DirichletZero &&
                    (x == 0 || y == 0 || z == 0 || x == d.nx - 1 || y == d.ny - 1 ||
                     z == d.nz - 1))
                    continue;
                free_vertices.push_back(div.frame.index(x, y, z));
            }

    if (free_vertices.size() > 20)
        throw std::invalid_argument(
            "exhaustive_binary_min: " + std::to_string(free_vertices.size()) +
            " free vertices exceed the 2^20 enumeration bound (max 20)");

    const std::uint64_t configs = std::uint64_t{1} << free_vertices.size();
    ScalarGrid u(div.frame, 0.0);
    BinaryMinResult best{ScalarGrid(div.frame, 0.0), 0.0};
    bool have_best = false;

    for (std::uint64_t m = 0; m < configs; ++m) {
        for (std::size_t j = 0; j < free_vertices.size(); ++j)
            u.data[free_vertices[j]] = (m >> j) & 1 ? 1.0 : 0.0;
        const double e = energy(u, div, lambda, SolveMode::TV);
        bool better = !have_best || e < best.energy;
        if (have_best && e == best.energy) {
            // Tie: prefer the assignment that is lexicographically smaller in
            // vertex order (free_vertices is already vertex-ordered).
            for (std::size_t j = 0; j < free_vertices.size(); ++j) {
                const bool cur = (m >> j) & 1;
                const bool inc = best.argmin.data[free_vertices[j]] != 0.0;
                if (cur != inc) {
                    better = !cur;
                    break;
                }
            }
        }
        if (better) {
            best.argmin = u;
            best.energy = e;
            have_best = true;
        }
    }
    return best;
}

}  // namespace recon
