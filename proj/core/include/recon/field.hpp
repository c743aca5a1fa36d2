#pragma once

#include <vector>

#include "recon/grid.hpp"
#include "recon/vec3.hpp"

namespace recon {

/// One input sample: a position and a weak outward orientation estimate.
/// The orientation need not be unit length or accurate, only outward-ish.
struct PointSample {
    Vec3 p;
    Vec3 v;
};

/// Distributes every sample's orientation vector to the 8 vertices of its
/// containing cell with trilinear weights; contributions accumulate.
/// Throws std::invalid_argument naming the first sample outside the grid.
VectorGrid splat(const std::vector<PointSample>& samples, const GridFrame& frame);

/// Separable iterated box filter: each component convolved n times per axis
/// with the normalized 3-tap kernel (1/3,1/3,1/3), zero beyond the grid.
/// The two outermost vertex layers are forced to zero afterwards so the
/// divergence stencil never sees nonzero data next to the border.
VectorGrid box_smooth(const VectorGrid& field, int n);

/// Same filter for a scalar field (no boundary zeroing).
ScalarGrid box_filter(const ScalarGrid& g, int n);

/// Central-difference divergence in world units: at interior vertices
/// (v1[x+1]-v1[x-1])/(2h) + corresponding y and z terms; boundary vertices 0.
ScalarGrid divergence(const VectorGrid& field);

}  // namespace recon
