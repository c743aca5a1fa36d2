#pragma once

#include <cstddef>
#include <vector>

#include "recon/grid.hpp"
#include "recon/surface.hpp"
#include "recon/vec3.hpp"

namespace recon {

/// Combinatorial summary of a triangle mesh.
struct MeshTopology {
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;      // unique undirected edges
    std::size_t triangle_count = 0;
    std::size_t boundary_edges = 0;    // edges used by exactly one triangle
    std::size_t nonmanifold_edges = 0; // edges used by three or more
    int components = 0;                // vertex-connectivity components
    long euler = 0;                    // V - E + F

    /// Closed 2-manifold: every edge in exactly two triangles, once per
    /// direction (consistent winding).
    bool watertight = false;
    int genus() const { return static_cast<int>((2 * components - euler) / 2); }
};

MeshTopology analyze_topology(const TriangleMesh& mesh);

/// Result of probing the scalar field on both sides of each triangle.
struct OrientationCheck {
    std::size_t tested = 0;
    std::size_t violations = 0;  // triangles whose normal does not point
                                 // toward the smaller field values
};

/// Samples `field` a quarter-cell along each triangle normal from the
/// centroid: outward-oriented triangles see field > isovalue behind the face
/// and field < isovalue in front of it.
OrientationCheck check_outward_orientation(const TriangleMesh& mesh, const ScalarGrid& field,
                                           double isovalue);

/// Exact distance from p to triangle (a,b,c).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// sqrt(mean squared distance) from each point to its nearest triangle,
/// accelerated by an axis-aligned BVH; numerically identical to the
/// brute-force scan. Throws std::invalid_argument on an empty mesh or list.
double rms_distance(const TriangleMesh& mesh, const std::vector<Vec3>& points);

/// Reference implementation scanning every triangle per point.
double rms_distance_brute(const TriangleMesh& mesh, const std::vector<Vec3>& points);

}  // namespace recon
