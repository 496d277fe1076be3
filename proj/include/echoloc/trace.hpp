#pragma once

#include <string>
#include <vector>

#include "echoloc/bvh.hpp"
#include "echoloc/observation.hpp"
#include "echoloc/wedge.hpp"

namespace echoloc {

// Read-only geometry bundle shared by tracing, synthesis and the CLI. Built
// once per run; safe to use from many threads concurrently.
struct Scene {
    TriangleMesh mesh;
    Bvh bvh;
    std::vector<Wedge> wedges;

    Scene() = default;
    explicit Scene(TriangleMesh m, double max_theta_w = kDefaultWedgeAngleLimit)
        : mesh(std::move(m)) {
        bvh.build(mesh);
        wedges = extract_wedges(mesh, max_theta_w);
    }

    // The bvh points into `mesh`, so copies and moves must re-point it.
    Scene(const Scene& o) : mesh(o.mesh), bvh(o.bvh), wedges(o.wedges) { bvh.rebind(mesh); }
    Scene(Scene&& o) noexcept
        : mesh(std::move(o.mesh)), bvh(std::move(o.bvh)), wedges(std::move(o.wedges)) {
        bvh.rebind(mesh);
    }
    Scene& operator=(const Scene& o) {
        if (this != &o) {
            mesh = o.mesh;
            bvh = o.bvh;
            wedges = o.wedges;
            bvh.rebind(mesh);
        }
        return *this;
    }
    Scene& operator=(Scene&& o) noexcept {
        if (this != &o) {
            mesh = std::move(o.mesh);
            bvh = std::move(o.bvh);
            wedges = std::move(o.wedges);
            bvh.rebind(mesh);
        }
        return *this;
    }
};

struct TraceConfig {
    int n_d = 5;                   // diffraction rays per event; 0 disables diffraction
    double v_th = 0.95;            // diffractability threshold (cosine)
    int max_order = 3;             // max combined reflection+diffraction depth
    double max_ray_length = 30.0;  // m, cap for rays that escape the scene
    double phi_margin = deg_to_rad(1.0);  // inset from shadow-sector boundaries
};

enum class RayKind { direct, reflection, diffraction };

const char* to_string(RayKind kind);

struct RaySegment {
    Vec3 origin;
    Vec3 dir;            // unit
    double length = 0.0;
    int order = 0;       // 0 for the primary ray, +1 per interaction
    RayKind kind = RayKind::direct;
};

struct RayPathNode {
    RaySegment seg;
    int parent = -1;  // index into RayPathTree::nodes, -1 for the root
};

// All candidate propagation paths consistent with one observation, rooted at
// the backward primary ray. Node 0 is the root; children follow their parent
// in depth-first order (reflection child first, then diffraction children).
struct RayPathTree {
    int observation = 0;
    std::vector<RayPathNode> nodes;
};

// Specular bounce of a propagation direction off a surface with unit normal n.
inline Vec3 reflect(const Vec3& dir, const Vec3& normal) {
    return dir - normal * (2.0 * dir.dot(normal));
}

// How plausibly a ray segment grazes a wedge edge: the cosine of the angle
// between the segment and its ideally generated ray, i.e. the ray from the
// same origin that passes exactly through the closest edge point m_d.
// 1 means the segment already runs through the edge. A segment starting on
// the edge itself has no defined ideal ray and scores 1 by convention.
struct Diffractability {
    double v_d = 0.0;
    ClosestApproach approach;
};

Diffractability diffractability(const Vec3& origin, const Vec3& dir, const Wedge& wedge);

// Is `candidate` (a direction leaving the edge) inside the angular sector
// that the wedge occludes from a ray arriving along `incident`? The straight
// continuation of the incident ray is the shadow boundary and counts as
// shadowed; so does the far face itself.
bool shadow_region_test(const Wedge& wedge, const Vec3& incident, const Vec3& candidate);

// Direction on the diffraction cone at local azimuth (from e_x toward e_y)
// and polar angle theta_d from the edge axis, with the along-edge component
// taken as -cos(theta_d).
Vec3 cone_direction(const Wedge& wedge, double azimuth, double theta_d);

// The fan of diffraction directions a ray arriving along `incident` spawns
// at the wedge: n_d directions on the cone that preserves the incident's
// along-edge component, spread uniformly across the shadow sector with a
// phi_margin inset from its boundaries. Empty when the sector vanishes (the
// incident ray illuminates both faces, runs along the edge, or the sector is
// narrower than the margins).
std::vector<Vec3> diffraction_directions(const Wedge& wedge, const Vec3& incident,
                                         double theta_d, int n_d,
                                         double phi_margin = deg_to_rad(1.0));

// Expand one observation into its backward ray-path tree.
RayPathTree trace_observation(const Scene& scene, const Observation& obs,
                              const TraceConfig& config);

// Trace every observation of one frame. All observations must share a frame
// id. The parallel version distributes observations across OpenMP threads
// and is bit-identical to the serial one.
std::vector<RayPathTree> trace_frame(const Scene& scene, const std::vector<Observation>& obs,
                                     const TraceConfig& config);
std::vector<RayPathTree> trace_frame_serial(const Scene& scene,
                                            const std::vector<Observation>& obs,
                                            const TraceConfig& config);

// CSV rows: frame,obs,node,parent,kind,order,ox,oy,oz,dx,dy,dz,length.
std::string ray_trees_to_csv(const std::vector<RayPathTree>& trees, int frame,
                             bool header = true);

}  // namespace echoloc
