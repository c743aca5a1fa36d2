#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "recon/field.hpp"
#include "recon/grid.hpp"
#include "recon/vec3.hpp"

namespace recon {

/// Indexed triangle surface. Triangles are counter-clockwise seen from
/// outside: normals point toward decreasing field values (outward for an
/// inside-is-1 indicator).
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
};

struct ThresholdResult {
    ScalarGrid binary;
    std::size_t inside_count = 0;
};

/// Binary super-level set: 1 where u > mu, else 0.
/// Throws std::invalid_argument unless mu lies in (0,1).
ThresholdResult threshold(const ScalarGrid& u, double mu);

/// Re-smooths a binary indicator with the same n=3 iterated box filter used
/// for the vector field (zero padding, no boundary zeroing).
ScalarGrid smooth_binary(const ScalarGrid& u_hat);

/// Mean of trilinearly interpolated field values at the sample positions;
/// the extraction isovalue. Throws std::invalid_argument on an empty list.
double select_isovalue(const ScalarGrid& u_tilde, const std::vector<PointSample>& samples);

/// Marching cubes over all cells with a fixed 256-case table whose ambiguous
/// faces are resolved consistently on both sides (above-isovalue corners kept
/// separated), so the output is watertight whenever the surface stays off the
/// grid boundary. Edge vertices are welded through a grid-edge key map.
/// Returns an empty mesh when the isovalue misses the field's value range.
TriangleMesh marching_cubes(const ScalarGrid& u_tilde, double isovalue);

}  // namespace recon
