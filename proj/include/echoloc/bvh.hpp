#pragma once

#include <optional>
#include <vector>

#include "echoloc/mesh.hpp"
#include "echoloc/vec3.hpp"

namespace echoloc {

// Hits closer than this along the ray are treated as the surface the ray
// just left and ignored.
constexpr double kSelfHitEpsilon = 1e-4;  // m

struct RayHit {
    int triangle = -1;
    double distance = 0.0;
    Vec3 point;
    Vec3 normal;  // triangle normal, as stored in the mesh
};

// Watertight-enough ray/triangle test used by both the BVH and the
// brute-force reference. Inclusive barycentric bounds so rays through a
// shared edge register on both incident triangles.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir,
                                   const Vec3& a, const Vec3& b, const Vec3& c);

/**
 * Median-split AABB tree over mesh triangles.
 *
 * Closest-hit queries accept hits with distance in (kSelfHitEpsilon,
 * max_dist] and break exact distance ties (shared edges, corners) toward the
 * lowest triangle id so traversal order can never change the answer.
 */
class Bvh {
public:
    Bvh() = default;
    explicit Bvh(const TriangleMesh& mesh) { build(mesh); }

    void build(const TriangleMesh& mesh);

    std::optional<RayHit> intersect(const Vec3& origin, const Vec3& dir, double max_dist) const;

    // True if anything blocks (origin, origin + dir*max_dist); same epsilon
    // policy as intersect.
    bool occluded(const Vec3& origin, const Vec3& dir, double max_dist) const {
        return intersect(origin, dir, max_dist).has_value();
    }

    const TriangleMesh& mesh() const { return *mesh_; }

    // Re-point at the mesh after the owning bundle was copied or moved. The
    // content must be the mesh this tree was built over.
    void rebind(const TriangleMesh& mesh) { mesh_ = &mesh; }

private:
    struct Node {
        Aabb box;
        int left = -1;    // internal: child indices
        int right = -1;
        int first = 0;    // leaf: range into tri_order_
        int count = 0;
    };

    int build_node(std::vector<int>& tris, int first, int count);

    const TriangleMesh* mesh_ = nullptr;
    std::vector<Node> nodes_;
    std::vector<int> tri_order_;
    std::vector<Aabb> tri_boxes_;
};

// Exhaustive all-triangle query with the identical acceptance and
// tie-breaking rules; the reference the BVH is tested against.
std::optional<RayHit> intersect_brute_force(const TriangleMesh& mesh, const Vec3& origin,
                                            const Vec3& dir, double max_dist);

}  // namespace echoloc
