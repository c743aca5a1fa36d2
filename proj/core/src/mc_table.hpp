#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace recon::detail {

// Cube corners are numbered bit-wise: corner c sits at
// ((c&1), (c>>1)&1, (c>>2)&1) in cell-local coordinates.
//
//        6----------7            edge ids
//       /|         /|              0..3  x-aligned, id = 0 + y + 2z
//      / |        / |              4..7  y-aligned, id = 4 + x + 2z
//     4----------5  |              8..11 z-aligned, id = 8 + x + 2y
//     |  2-------|--3
//     | /        | /     (y,z), (x,z), (x,y) are the coordinates of the
//     |/         |/      edge's lower corner on the two non-edge axes.
//     0----------1

inline constexpr std::array<std::array<std::uint8_t, 2>, 12> kEdgeCorners = {{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // x edges: (y,z) = 00,10,01,11
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // y edges: (x,z) = 00,10,01,11
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // z edges: (x,y) = 00,10,01,11
}};

inline constexpr int edge_axis(int e) { return e / 4; }

// Surface patch for one of the 256 corner sign configurations: the oriented
// boundary loops of the above-isovalue region (sequences of cut-edge ids,
// wound so the normal points away from the above-isovalue side) plus their
// triangulation. Triangles reference cut-edge ids; every internal diagonal
// joins two cube edges that share no cube face, so it runs strictly through
// the cell interior and can never coincide with an edge emitted by a
// neighboring cell.
struct CaseLoops {
    std::vector<std::vector<std::uint8_t>> loops;
    std::vector<std::array<std::uint8_t, 3>> tris;
};

// The shared, lazily built table. Construction self-checks segment pairing,
// orientation, cycle closure, and diagonal placement for every configuration.
const std::array<CaseLoops, 256>& mc_case_table();

}  // namespace recon::detail
