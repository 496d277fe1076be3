#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "echoloc/vec3.hpp"

namespace echoloc {

struct Triangle {
    std::array<int, 3> v{};
};

// Undirected edge key: vertex ids stored sorted so (a,b) == (b,a).
struct EdgeKey {
    int a = 0;
    int b = 0;

    EdgeKey() = default;
    EdgeKey(int i, int j) : a(i < j ? i : j), b(i < j ? j : i) {}

    bool operator<(const EdgeKey& o) const {
        return a != o.a ? a < o.a : b < o.b;
    }
    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

/**
 * Indexed triangle mesh with per-triangle unit normals derived from vertex
 * winding. Normals point away from the solid: outward for obstacles, into
 * the room for enclosing shells.
 */
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::vector<Vec3> normals;  // one per triangle

    Vec3 triangle_center(int t) const {
        const auto& tri = triangles[t];
        return (vertices[tri.v[0]] + vertices[tri.v[1]] + vertices[tri.v[2]]) / 3.0;
    }

    Aabb bounds() const;

    // Undirected edge -> ids of incident triangles, in triangle-id order.
    std::map<EdgeKey, std::vector<int>> edge_adjacency() const;

    std::size_t edge_count() const { return edge_adjacency().size(); }
};

// Recompute normals from winding and check structural sanity: all indices in
// range and no zero-area triangles. Throws ValidationError naming offenders.
void finalize_mesh(TriangleMesh& mesh);

// Wavefront OBJ subset: v records and f records (triangles and fans for
// larger polygons, negative indices allowed). Anything else is skipped.
// Parse problems throw ParseError with the 1-based line number; the loaded
// mesh is validated via finalize_mesh before it is returned.
TriangleMesh load_obj(const std::string& path);
TriangleMesh parse_obj(const std::string& text, const std::string& name);

void save_obj(const TriangleMesh& mesh, const std::string& path);

}  // namespace echoloc
