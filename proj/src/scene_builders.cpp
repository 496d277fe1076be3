#include "echoloc/scene_builders.hpp"

namespace echoloc {

namespace {

// One quad face of an axis-aligned box. axis is the fixed coordinate,
// positive_side picks lo/hi, and the winding is arranged CCW as seen from
// outside the box, then flipped when the normals must face the other way.
void add_box_face(TriangleMesh& mesh, const Vec3& lo, const Vec3& hi, int axis,
                  bool positive_side, bool outward) {
    int u = (axis + 1) % 3;
    int v = (axis + 2) % 3;

    auto corner = [&](bool du, bool dv) {
        double c[3];
        c[axis] = positive_side ? (&hi.x)[axis] : (&lo.x)[axis];
        c[u] = du ? (&hi.x)[u] : (&lo.x)[u];
        c[v] = dv ? (&hi.x)[v] : (&lo.x)[v];
        return Vec3{c[0], c[1], c[2]};
    };

    int base = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(corner(false, false));
    mesh.vertices.push_back(corner(true, false));
    mesh.vertices.push_back(corner(true, true));
    mesh.vertices.push_back(corner(false, true));

    // (0,1,2,3) winds CCW seen from +axis; on the lo side that is the inside,
    // so the loop is reversed there, and reversed again if inward-facing.
    bool ccw = positive_side == outward;
    if (ccw) {
        mesh.triangles.push_back({{base, base + 1, base + 2}});
        mesh.triangles.push_back({{base, base + 2, base + 3}});
    } else {
        mesh.triangles.push_back({{base, base + 2, base + 1}});
        mesh.triangles.push_back({{base, base + 3, base + 2}});
    }
}

// Merge duplicated corner vertices so shared edges are index-shared (the
// wedge extractor keys edges by vertex id, not position).
void weld_vertices(TriangleMesh& mesh) {
    std::map<std::array<double, 3>, int> seen;
    std::vector<Vec3> verts;
    std::vector<int> remap(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& p = mesh.vertices[i];
        auto [it, inserted] = seen.try_emplace({p.x, p.y, p.z}, static_cast<int>(verts.size()));
        if (inserted) verts.push_back(p);
        remap[i] = it->second;
    }
    for (Triangle& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) t.v[k] = remap[t.v[k]];
    }
    mesh.vertices = std::move(verts);
}

}  // namespace

TriangleMesh make_box_mesh(const Vec3& lo, const Vec3& hi, bool outward, bool open_bottom) {
    TriangleMesh mesh;
    for (int axis = 0; axis < 3; ++axis) {
        for (bool positive : {false, true}) {
            if (open_bottom && axis == 2 && !positive) continue;
            add_box_face(mesh, lo, hi, axis, positive, outward);
        }
    }
    weld_vertices(mesh);
    finalize_mesh(mesh);
    return mesh;
}

void append_mesh(TriangleMesh& dst, const TriangleMesh& src) {
    int base = static_cast<int>(dst.vertices.size());
    dst.vertices.insert(dst.vertices.end(), src.vertices.begin(), src.vertices.end());
    for (Triangle t : src.triangles) {
        for (int k = 0; k < 3; ++k) t.v[k] += base;
        dst.triangles.push_back(t);
    }
    finalize_mesh(dst);
}

TriangleMesh make_room_with_box() {
    TriangleMesh room = make_shoebox_mesh(Vec3{7, 7, 3});
    Aabb box = room_box_obstacle_bounds();
    TriangleMesh obstacle = make_box_mesh(box.lo, box.hi, /*outward=*/true, /*open_bottom=*/true);
    append_mesh(room, obstacle);
    return room;
}

Aabb room_box_obstacle_bounds() {
    // Partition-style box: anchored a hair off the south wall so the mesh
    // stays cleanly separated, leaving one walk-around gap at the north end
    // and a 1 m gap over the top. NLOS geometry then offers an
    // around-the-corner bend, an over-the-top bend for elevated sources and
    // sparse ceiling reflections instead of a flood of wall echoes.
    return {Vec3{3.3, 0.02, 0.0}, Vec3{3.6, 5.2, 2.0}};
}

}  // namespace echoloc
