#include "recon/mesh_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace recon {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

MeshTopology analyze_topology(const TriangleMesh& mesh) {
    MeshTopology t;
    t.vertex_count = mesh.vertices.size();
    t.triangle_count = mesh.triangles.size();

    std::unordered_map<std::uint64_t, int> undirected;
    std::unordered_map<std::uint64_t, int> directed;
    undirected.reserve(mesh.triangles.size() * 2);
    directed.reserve(mesh.triangles.size() * 3);
    UnionFind uf(mesh.vertices.size());
    std::vector<bool> referenced(mesh.vertices.size(), false);

    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t a = tri[k], b = tri[(k + 1) % 3];
            ++undirected[edge_key(std::min(a, b), std::max(a, b))];
            ++directed[edge_key(a, b)];
            uf.unite(a, b);
            referenced[a] = true;
        }
    }

    t.edge_count = undirected.size();
    bool directed_clean = true;
    for (const auto& [key, n] : undirected) {
        if (n == 1) ++t.boundary_edges;
        if (n > 2) ++t.nonmanifold_edges;
    }
    for (const auto& [key, n] : directed)
        if (n != 1) directed_clean = false;

    std::unordered_map<std::uint32_t, bool> roots;
    for (std::uint32_t v = 0; v < referenced.size(); ++v)
        if (referenced[v]) roots[uf.find(v)] = true;
    t.components = static_cast<int>(roots.size());

    t.euler = static_cast<long>(t.vertex_count) - static_cast<long>(t.edge_count) +
              static_cast<long>(t.triangle_count);
    t.watertight = t.triangle_count > 0 && t.boundary_edges == 0 &&
                   t.nonmanifold_edges == 0 && directed_clean;
    return t;
}

OrientationCheck check_outward_orientation(const TriangleMesh& mesh, const ScalarGrid& field,
                                           double isovalue) {
    OrientationCheck oc;
    const double step = 0.25 * field.frame.h;
    for (const auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        const Vec3 n = cross(b - a, c - a);
        const double len = norm(n);
        if (len < 1e-14 * field.frame.h * field.frame.h) continue;  // too small to probe
        const Vec3 nn = n / len;
        const Vec3 centroid = (a + b + c) / 3.0;
        ++oc.tested;
        const double front = trilinear_sample(field, centroid + step * nn);
        const double back = trilinear_sample(field, centroid - step * nn);
        if (!(back > front))
            ++oc.violations;
        else if (!(back > isovalue && front < isovalue))
            ++oc.violations;
    }
    return oc;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Closest point on a triangle by Voronoi-region classification.
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return norm(p - a);

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return norm(p - b);

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0)
        return norm(p - (a + (d1 / (d1 - d3)) * ab));

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return norm(p - c);

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0)
        return norm(p - (a + (d2 / (d2 - d6)) * ac));

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0)
        return norm(p - (b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b)));

    const double denom = 1.0 / (va + vb + vc);
    const Vec3 closest = a + (vb * denom) * ab + (vc * denom) * ac;
    return norm(p - closest);
}

namespace {

constexpr std::uint32_t kLeafSize = 8;

void grow(Vec3& lo, Vec3& hi, const Vec3& p) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
}

struct BvhNode {
    Vec3 lo, hi;
    std::int32_t left = -1, right = -1;
    std::uint32_t begin = 0, end = 0;
};

struct Bvh {
    std::vector<BvhNode> nodes;
    std::vector<std::uint32_t> order;
};

std::int32_t build_node(Bvh& bvh, const TriangleMesh& mesh, const std::vector<Vec3>& centroids,
                    std::uint32_t begin, std::uint32_t end) {
    BvhNode node;
    node.lo = {1e300, 1e300, 1e300};
    node.hi = {-1e300, -1e300, -1e300};
    for (std::uint32_t k = begin; k < end; ++k)
        for (std::uint32_t vi : mesh.triangles[bvh.order[k]])
            grow(node.lo, node.hi, mesh.vertices[vi]);
    node.begin = begin;
    node.end = end;
    const std::int32_t id = static_cast<std::int32_t>(bvh.nodes.size());
    bvh.nodes.push_back(node);
    if (end - begin > kLeafSize) {
        const Vec3 ext = node.hi - node.lo;
        const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
        const std::uint32_t mid = (begin + end) / 2;
        auto coord = [&](std::uint32_t tri) {
            const Vec3& c = centroids[tri];
            return axis == 0 ? c.x : axis == 1 ? c.y : c.z;
        };
        std::nth_element(bvh.order.begin() + begin, bvh.order.begin() + mid,
                         bvh.order.begin() + end, [&](std::uint32_t ta, std::uint32_t tb) {
                             const double ca = coord(ta), cb = coord(tb);
                             return ca < cb || (ca == cb && ta < tb);
                         });
        const std::int32_t l = build_node(bvh, mesh, centroids, begin, mid);
        const std::int32_t r = build_node(bvh, mesh, centroids, mid, end);
        bvh.nodes[id].left = l;
        bvh.nodes[id].right = r;
    }
    return id;
}

double aabb_dist2(const Vec3& p, const Vec3& lo, const Vec3& hi) {
    const double dx = p.x < lo.x ? lo.x - p.x : (p.x > hi.x ? p.x - hi.x : 0.0);
    const double dy = p.y < lo.y ? lo.y - p.y : (p.y > hi.y ? p.y - hi.y : 0.0);
    const double dz = p.z < lo.z ? lo.z - p.z : (p.z > hi.z ? p.z - hi.z : 0.0);
    return dx * dx + dy * dy + dz * dz;
}

double nearest_dist(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& p) {
    double best = 1e300;  // distance, not squared: point_triangle_distance is exact
    std::int32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const std::int32_t id = stack[--top];
        const BvhNode& node = bvh.nodes[id];
        const double lb2 = aabb_dist2(p, node.lo, node.hi);
        if (lb2 >= best * best) continue;
        if (node.left < 0) {
            for (std::uint32_t k = node.begin; k < node.end; ++k) {
                const auto& tri = mesh.triangles[bvh.order[k]];
                const double d = point_triangle_distance(p, mesh.vertices[tri[0]],
                                                         mesh.vertices[tri[1]],
                                                         mesh.vertices[tri[2]]);
                best = std::min(best, d);
            }
        } else {
            // Visit the nearer child first for tighter pruning.
            const double dl = aabb_dist2(p, bvh.nodes[node.left].lo, bvh.nodes[node.left].hi);
            const double dr =
                aabb_dist2(p, bvh.nodes[node.right].lo, bvh.nodes[node.right].hi);
            if (dl <= dr) {
                stack[top++] = node.right;
                stack[top++] = node.left;
            } else {
                stack[top++] = node.left;
                stack[top++] = node.right;
            }
        }
    }
    return best;
}

void check_rms_inputs(const TriangleMesh& mesh, const std::vector<Vec3>& points) {
    if (mesh.triangles.empty()) throw std::invalid_argument("rms_distance: empty mesh");
    if (points.empty()) throw std::invalid_argument("rms_distance: empty point list");
}

}  // namespace

double rms_distance(const TriangleMesh& mesh, const std::vector<Vec3>& points) {
    check_rms_inputs(mesh, points);
    Bvh bvh;
    bvh.order.resize(mesh.triangles.size());
    std::iota(bvh.order.begin(), bvh.order.end(), 0u);
    std::vector<Vec3> centroids(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        centroids[t] =
            (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    }
    bvh.nodes.reserve(2 * mesh.triangles.size() / kLeafSize + 8);
    build_node(bvh, mesh, centroids, 0, static_cast<std::uint32_t>(mesh.triangles.size()));

    double sum2 = 0.0;
    for (const Vec3& p : points) {
        const double d = nearest_dist(bvh, mesh, p);
        sum2 += d * d;
    }
    return std::sqrt(sum2 / static_cast<double>(points.size()));
}

double rms_distance_brute(const TriangleMesh& mesh, const std::vector<Vec3>& points) {
    check_rms_inputs(mesh, points);
    double sum2 = 0.0;
    for (const Vec3& p : points) {
        double best = 1e300;
        for (const auto& tri : mesh.triangles) {
            const double d = point_triangle_distance(p, mesh.vertices[tri[0]],
                                                     mesh.vertices[tri[1]],
                                                     mesh.vertices[tri[2]]);
            best = std::min(best, d);
        }
        sum2 += best * best;
    }
    return std::sqrt(sum2 / static_cast<double>(points.size()));
}

}  // namespace recon
