#include "echoloc/bvh.hpp"

#include <algorithm>
#include <cmath>

namespace echoloc {

namespace {

constexpr double kBaryEpsilon = 1e-12;   // inclusive barycentric slack for edge grazes
constexpr double kTieEpsilon = 1e-9;     // distances closer than this count as a tie

// Candidate ordering shared by BVH and brute force: nearest first, exact
// ties to the lowest triangle id.
bool better_hit(double t, int tri, double best_t, int best_tri) {
    if (best_tri < 0) return true;
    if (t < best_t - kTieEpsilon) return true;
    if (t > best_t + kTieEpsilon) return false;
    return tri < best_tri;
}

}  // namespace

std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir,
                                   const Vec3& a, const Vec3& b, const Vec3& c) {
    // Moller-Trumbore.
    Vec3 e1 = b - a;
    Vec3 e2 = c - a;
    Vec3 p = dir.cross(e2);
    double det = e1.dot(p);
    if (std::fabs(det) < 1e-14) return std::nullopt;  // parallel to the plane

    double inv_det = 1.0 / det;
    Vec3 s = origin - a;
    double u = s.dot(p) * inv_det;
    if (u < -kBaryEpsilon || u > 1.0 + kBaryEpsilon) return std::nullopt;

    Vec3 q = s.cross(e1);
    double v = dir.dot(q) * inv_det;
    if (v < -kBaryEpsilon || u + v > 1.0 + kBaryEpsilon) return std::nullopt;

    double t = e2.dot(q) * inv_det;
    if (t <= 0.0) return std::nullopt;
    return t;
}

void Bvh::build(const TriangleMesh& mesh) {
    mesh_ = &mesh;
    nodes_.clear();
    tri_order_.resize(mesh.triangles.size());
    tri_boxes_.resize(mesh.triangles.size());

    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        tri_order_[t] = t;
        Aabb box;
        box.lo = box.hi = mesh.vertices[mesh.triangles[t].v[0]];
        box.expand(mesh.vertices[mesh.triangles[t].v[1]]);
        box.expand(mesh.vertices[mesh.triangles[t].v[2]]);
        // Pad so axis-aligned (zero-thickness) boxes survive the slab test.
        tri_boxes_[t] = box.inflated(1e-9);
    }

    if (!tri_order_.empty()) {
        std::vector<int> tris = tri_order_;
        build_node(tris, 0, static_cast<int>(tris.size()));
        tri_order_ = tris;
    }
}

int Bvh::build_node(std::vector<int>& tris, int first, int count) {
    Node node;
    node.box = tri_boxes_[tris[first]];
    for (int i = 1; i < count; ++i) node.box.expand(tri_boxes_[tris[first + i]]);

    int index = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    constexpr int kLeafSize = 4;
    if (count <= kLeafSize) {
        nodes_[index].first = first;
        nodes_[index].count = count;
        return index;
    }

    // Median split along the widest axis of the centroid bounds.
    Aabb centroid_box;
    centroid_box.lo = centroid_box.hi = tri_boxes_[tris[first]].center();
    for (int i = 1; i < count; ++i) centroid_box.expand(tri_boxes_[tris[first + i]].center());
    Vec3 ext = centroid_box.extent();
    int axis = 0;
    if (ext.y > ext.x) axis = 1;
    if (ext.z > (&ext.x)[axis]) axis = 2;

    int mid = first + count / 2;
    std::nth_element(tris.begin() + first, tris.begin() + mid, tris.begin() + first + count,
                     [&](int lhs, int rhs) {
                         Vec3 cl3 = tri_boxes_[lhs].center();
                         Vec3 cr3 = tri_boxes_[rhs].center();
                         double cl = (&cl3.x)[axis];
                         double cr = (&cr3.x)[axis];
                         return cl != cr ? cl < cr : lhs < rhs;
                     });

    int left = build_node(tris, first, mid - first);
    int right = build_node(tris, mid, first + count - mid);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

namespace {

// Slab test; fmin/fmax absorb the NaNs from 0 * inf when the origin lies on
// a slab plane.
bool hit_box(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, double max_t) {
    double t1 = (box.lo.x - origin.x) * inv_dir.x;
    double t2 = (box.hi.x - origin.x) * inv_dir.x;
    double tmin = std::fmin(t1, t2);
    double tmax = std::fmax(t1, t2);

    t1 = (box.lo.y - origin.y) * inv_dir.y;
    t2 = (box.hi.y - origin.y) * inv_dir.y;
    tmin = std::fmax(tmin, std::fmin(t1, t2));
    tmax = std::fmin(tmax, std::fmax(t1, t2));

    t1 = (box.lo.z - origin.z) * inv_dir.z;
    t2 = (box.hi.z - origin.z) * inv_dir.z;
    tmin = std::fmax(tmin, std::fmin(t1, t2));
    tmax = std::fmin(tmax, std::fmax(t1, t2));

    return tmax >= std::fmax(tmin, 0.0) && tmin <= max_t;
}

}  // namespace

std::optional<RayHit> Bvh::intersect(const Vec3& origin, const Vec3& dir, double max_dist) const {
    if (nodes_.empty()) return std::nullopt;

    Vec3 inv_dir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    double best_t = max_dist;
    int best_tri = -1;

    int stack[64];
    int top = 0;
    stack[top++] = 0;

    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        // Keep visiting up to best_t + tie so an equal-distance lower id in a
        // farther node still gets considered.
        if (!hit_box(node.box, origin, inv_dir, best_t + kTieEpsilon)) continue;

        if (node.count > 0) {
            for (int i = 0; i < node.count; ++i) {
                int tri = tri_order_[node.first + i];
                const Triangle& tv = mesh_->triangles[tri];
                auto t = ray_triangle(origin, dir, mesh_->vertices[tv.v[0]],
                                      mesh_->vertices[tv.v[1]], mesh_->vertices[tv.v[2]]);
                if (!t || *t <= kSelfHitEpsilon || *t > max_dist) continue;
                if (better_hit(*t, tri, best_t, best_tri)) {
                    best_t = *t;
                    best_tri = tri;
                }
            }
        } else {
            stack[top++] = node.left;
            stack[top++] = node.right;
        }
    }

    if (best_tri < 0) return std::nullopt;
    RayHit hit;
    hit.triangle = best_tri;
    hit.distance = best_t;
    hit.point = origin + dir * best_t;
    hit.normal = mesh_->normals[best_tri];
    return hit;
}

std::optional<RayHit> intersect_brute_force(const TriangleMesh& mesh, const Vec3& origin,
                                            const Vec3& dir, double max_dist) {
    double best_t = max_dist;
    int best_tri = -1;
    for (int tri = 0; tri < static_cast<int>(mesh.triangles.size()); ++tri) {
        const Triangle& tv = mesh.triangles[tri];
        auto t = ray_triangle(origin, dir, mesh.vertices[tv.v[0]], mesh.vertices[tv.v[1]],
                              mesh.vertices[tv.v[2]]);
        if (!t || *t <= kSelfHitEpsilon || *t > max_dist) continue;
        if (better_hit(*t, tri, best_t, best_tri)) {
            best_t = *t;
            best_tri = tri;
        }
    }
    if (best_tri < 0) return std::nullopt;
    RayHit hit;
    hit.triangle = best_tri;
    hit.distance = best_t;
    hit.point = origin + dir * best_t;
    hit.normal = mesh.normals[best_tri];
    return hit;
}

}  // namespace echoloc
