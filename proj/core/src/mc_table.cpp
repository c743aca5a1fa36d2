#include "mc_table.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

// Builds the 256-case table at first use instead of transcribing a published
// one. Faces with four cut edges (the ambiguous checkerboard faces) always
// keep the two above-isovalue corners separated; the rule depends only on the
// face's corner signs, so the two cells sharing a face always produce the same
// two chords and the mesh stays closed. Each loop is then triangulated so
// that internal diagonals never join two cube edges lying in a common face:
// such a diagonal would run inside that face, where the neighboring cell
// triangulates the same four crossings independently and could emit the same
// segment, pushing an edge to four incident triangles. Face-interior-free
// diagonals keep every mesh edge on exactly two triangles. Construction
// verifies pairing, orientation, cycle closure, and diagonal placement for
// every configuration and throws on any internal inconsistency, so a broken
// table cannot be used silently.

namespace recon::detail {

namespace {

struct V3 {
    double x, y, z;
};
V3 operator-(const V3& a, const V3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
V3 operator+(const V3& a, const V3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
V3 operator*(const V3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
double dot(const V3& a, const V3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
V3 cross(const V3& a, const V3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

V3 corner_pos(int c) {
    return {static_cast<double>(c & 1), static_cast<double>((c >> 1) & 1),
            static_cast<double>((c >> 2) & 1)};
}

V3 edge_mid(int e) {
    return (corner_pos(kEdgeCorners[e][0]) + corner_pos(kEdgeCorners[e][1])) * 0.5;
}

struct Face {
    V3 normal;                  // outward
    std::vector<int> corners;   // 4 cube corner ids
    std::vector<int> edges;     // 4 cube edge ids lying in the face
};

std::array<Face, 6> make_faces() {
    std::array<Face, 6> faces;
    int f = 0;
    for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side, ++f) {
            Face& face = faces[f];
            const double dir = side == 0 ? -1.0 : 1.0;
            face.normal = {axis == 0 ? dir : 0.0, axis == 1 ? dir : 0.0,
                           axis == 2 ? dir : 0.0};
            for (int c = 0; c < 8; ++c)
                if (((c >> axis) & 1) == side) face.corners.push_back(c);
            for (int e = 0; e < 12; ++e) {
                const int a = kEdgeCorners[e][0], b = kEdgeCorners[e][1];
                if (((a >> axis) & 1) == side && ((b >> axis) & 1) == side)
                    face.edges.push_back(e);
            }
        }
    return faces;
}

bool edge_touches(int e, int c) {
    return kEdgeCorners[e][0] == c || kEdgeCorners[e][1] == c;
}

// Signed side of point p relative to the directed chord a->b within a face of
// outward normal n. The convention keeps above-isovalue corners strictly
// negative.
double chord_side(const V3& p, const V3& a, const V3& b, const V3& n) {
    const V3 m = (a + b) * 0.5;
    return dot(p - m, cross(n, b - a));
}

// Appends the directed chord (from,to) for the given face, oriented so that
// inside_corner falls on the negative side, and verifies the separation.
void emit_segment(std::vector<std::array<int, 2>>& segments, const Face& face, int mask,
                  int ea, int eb, int inside_corner, bool lone_corner) {
    int from = ea, to = eb;
    if (chord_side(corner_pos(inside_corner), edge_mid(from), edge_mid(to), face.normal) > 0)
        std::swap(from, to);

    for (int c : face.corners) {
        const double s =
            chord_side(corner_pos(c), edge_mid(from), edge_mid(to), face.normal);
        if (s == 0.0) throw std::logic_error("mc table: corner on chord");
        const bool inside = (mask >> c) & 1;
        const bool want_negative = lone_corner ? c == inside_corner : inside;
        if ((s < 0.0) != want_negative)
            throw std::logic_error("mc table: chord does not separate corners");
    }
    segments.push_back({from, to});
}

// True when cube edges a and b lie in a common cube face. A chord between
// crossing points on such a pair lies in that face's plane; all other chords
// pass strictly through the cell interior (a crossing point touches a face
// plane only when its whole cube edge lies in that face).
std::array<std::array<bool, 12>, 12> face_sharing(const std::array<Face, 6>& faces) {
    std::array<std::array<bool, 12>, 12> shares{};
    for (const Face& face : faces)
        for (int a : face.edges)
            for (int b : face.edges)
                if (a != b) shares[a][b] = true;
    return shares;
}

// Triangulates loop[i..j] (a contiguous fan of the oriented loop, whose
// bounding chord is already accepted) with the first triangulation, in a
// fixed search order, whose internal diagonals avoid face-sharing edge
// pairs. Loop sides are exempt: they lie in faces by construction and are
// matched one-to-one, opposite direction, by the neighboring cell.
bool triangulate_range(const std::vector<std::uint8_t>& loop,
                       const std::array<std::array<bool, 12>, 12>& shares, std::size_t i,
                       std::size_t j, std::vector<std::array<std::uint8_t, 3>>& out) {
    if (j - i < 2) return true;
    auto usable = [&](std::size_t p, std::size_t q) {
        const bool side = q - p == 1 || (p == 0 && q == loop.size() - 1);
        return side || !shares[loop[p]][loop[q]];
    };
    for (std::size_t m = i + 1; m < j; ++m) {
        if (!usable(i, m) || !usable(m, j)) continue;
        const std::size_t mark = out.size();
        out.push_back({loop[i], loop[m], loop[j]});
        if (triangulate_range(loop, shares, i, m, out)
            && triangulate_range(loop, shares, m, j, out))
            return true;
        out.resize(mark);
    }
    return false;
}

CaseLoops build_case(int mask, const std::array<Face, 6>& faces,
                     const std::array<std::array<bool, 12>, 12>& shares) {
    std::vector<std::array<int, 2>> segments;

    for (const Face& face : faces) {
        std::vector<int> cut;
        for (int e : face.edges) {
            const bool a = (mask >> kEdgeCorners[e][0]) & 1;
            const bool b = (mask >> kEdgeCorners[e][1]) & 1;
            if (a != b) cut.push_back(e);
        }
        if (cut.empty()) continue;

        if (cut.size() == 2) {
            int q = -1;
            for (int c : face.corners)
                if ((mask >> c) & 1) q = c;
            emit_segment(segments, face, mask, cut[0], cut[1], q, /*lone_corner=*/false);
        } else if (cut.size() == 4) {
            // Checkerboard face: two diagonal above-isovalue corners, each cut
            // off by the chord through its two incident cut edges.
            for (int c : face.corners) {
                if (!((mask >> c) & 1)) continue;
                std::vector<int> inc;
                for (int e : cut)
                    if (edge_touches(e, c)) inc.push_back(e);
                if (inc.size() != 2) throw std::logic_error("mc table: bad ambiguous face");
                emit_segment(segments, face, mask, inc[0], inc[1], c, /*lone_corner=*/true);
            }
        } else {
            throw std::logic_error("mc table: impossible cut count");
        }
    }

    // Each cut edge must be left exactly once and entered exactly once.
    std::array<int, 12> next;
    next.fill(-1);
    std::array<int, 12> indeg{};
    for (const auto& s : segments) {
        if (next[s[0]] != -1) throw std::logic_error("mc table: duplicate out-edge");
        next[s[0]] = s[1];
        ++indeg[s[1]];
    }
    for (const auto& s : segments)
        if (next[s[1]] == -1 || indeg[s[0]] != 1)
            throw std::logic_error("mc table: open boundary");

    CaseLoops out;
    std::array<bool, 12> used{};
    for (int start = 0; start < 12; ++start) {
        if (next[start] == -1 || used[start]) continue;
        std::vector<std::uint8_t> loop;
        int e = start;
        do {
            if (used[e]) throw std::logic_error("mc table: crossing loops");
            used[e] = true;
            loop.push_back(static_cast<std::uint8_t>(e));
            e = next[e];
        } while (e != start);
        if (loop.size() < 3) throw std::logic_error("mc table: short loop");
        if (!triangulate_range(loop, shares, 0, loop.size() - 1, out.tris))
            throw std::logic_error("mc table: no face-safe triangulation");
        out.loops.push_back(std::move(loop));
    }
    return out;
}

std::array<CaseLoops, 256> build_table() {
    const std::array<Face, 6> faces = make_faces();
    const std::array<std::array<bool, 12>, 12> shares = face_sharing(faces);
    std::array<CaseLoops, 256> table;
    for (int mask = 0; mask < 256; ++mask) table[mask] = build_case(mask, faces, shares);

    // Spot-check the orientation convention on the single-corner case: the
    // triangle around corner 0 must face away from it.
    const auto& loops = table[1].loops;
    if (loops.size() != 1 || loops[0].size() != 3 || table[1].tris.size() != 1)
        throw std::logic_error("mc table: case 1 shape");
    const V3 a = edge_mid(loops[0][0]), b = edge_mid(loops[0][1]), c = edge_mid(loops[0][2]);
    if (dot(cross(b - a, c - a), V3{1, 1, 1}) <= 0.0)
        throw std::logic_error("mc table: case 1 orientation");
    return table;
}

}  // namespace

const std::array<CaseLoops, 256>& mc_case_table() {
    static const std::array<CaseLoops, 256> table = build_table();
    return table;
}

}  // namespace recon::detail
