#pragma once

#include "echoloc/mesh.hpp"

namespace echoloc {

// Axis-aligned box between lo and hi. Winding is chosen so normals face away
// from the solid: outward = true for obstacles, false for room shells (the
// air is inside, so the "solid" is everything beyond the walls).
// open_bottom omits the z = lo.z face; use it for obstacles resting on a
// floor so no coplanar face fights the floor and the rim edges stay
// boundary edges.
TriangleMesh make_box_mesh(const Vec3& lo, const Vec3& hi, bool outward, bool open_bottom = false);

inline TriangleMesh make_shoebox_mesh(const Vec3& size) {
    return make_box_mesh(Vec3{0, 0, 0}, size, /*outward=*/false);
}

// Append src geometry to dst (indices rebased).
void append_mesh(TriangleMesh& dst, const TriangleMesh& src);

// 7x7x3 m room with one box obstacle; the standard non-line-of-sight scene
// used by configs/ and the end-to-end tests.
TriangleMesh make_room_with_box();

// Obstacle footprint of make_room_with_box, handy for placing sources.
Aabb room_box_obstacle_bounds();

}  // namespace echoloc
