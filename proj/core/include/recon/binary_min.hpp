#pragma once

#include "recon/grid.hpp"
#include "recon/solver.hpp"

namespace recon {

struct BinaryMinResult {
    ScalarGrid argmin;  // values in {0,1}
    double energy = 0.0;
};

/// Enumerates every binary assignment over the free vertices (all of them
/// under Boundary::Free, interior only under DirichletZero with the boundary
/// fixed at 0) and returns the assignment minimizing the exact TV objective
/// lambda*sum|grad u| - sum(div*u) — the same discrete energy the solver
/// reports, with no epsilon smoothing. Ties break toward the assignment that
/// is lexicographically smallest in vertex order.
/// Throws std::invalid_argument when more than 20 vertices are free.
BinaryMinResult exhaustive_binary_min(const ScalarGrid& div, double lambda,
                                      Boundary boundary = Boundary::Free);

}  // namespace recon
