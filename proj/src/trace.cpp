#include "echoloc/trace.hpp"

#include <cmath>
#include <cstdio>

#include "echoloc/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace echoloc {

namespace {

constexpr double kAngleTol = 1e-9;  // rad, boundary slack for sector membership

double wrap_2pi(double a) {
    a = std::fmod(a, 2.0 * kPi);
    return a < 0.0 ? a + 2.0 * kPi : a;
}

// Angular bookkeeping around a wedge. "Air angles" are measured from the
// tri_a face half-plane (azimuth +theta_w/2) through the open air, so air
// directions live in (0, 2pi - theta_w) and material directions beyond that.
struct ShadowSector {
    bool valid = false;
    bool mirrored = false;  // sector computed with e_y flipped
    double air_width = 0.0;
    double start = 0.0;     // shadow boundary (straight continuation)
};

// Air angle of a direction, or a negative value if the direction has no
// component off the edge axis.
double air_angle(const Wedge& w, const Vec3& v, bool mirrored) {
    double px = v.dot(w.ex);
    double py = v.dot(w.ey);
    if (mirrored) py = -py;
    if (px * px + py * py < 1e-18) return -1.0;
    return wrap_2pi(std::atan2(py, px) - 0.5 * w.theta_w);
}

ShadowSector shadow_sector(const Wedge& w, const Vec3& incident) {
    ShadowSector sector;
    sector.air_width = 2.0 * kPi - w.theta_w;

    // Where the sound came from, seen from the edge.
    double a_s = air_angle(w, -incident, false);
    if (a_s < 0.0) return sector;  // incident runs along the edge

    // A grazing incident can land epsilon inside the material sector; snap
    // it to the nearer face.
    if (a_s > sector.air_width) {
        a_s = (a_s - sector.air_width < 2.0 * kPi - a_s) ? sector.air_width : 0.0;
    }

    // Fold so the source is nearest the tri_a face; the geometry is
    // symmetric, and it leaves the far face at air angle air_width.
    if (a_s > 0.5 * sector.air_width) {
        sector.mirrored = true;
        a_s = sector.air_width - a_s;
    }

    // Shadow runs from the straight continuation of the incident ray to the
    // far face. If the continuation already clears the far face, the source
    // illuminates both faces and nothing is occluded.
    sector.start = a_s + kPi;
    sector.valid = sector.start < sector.air_width - kAngleTol;
    return sector;
}

}  // namespace

const char* to_string(RayKind kind) {
    switch (kind) {
        case RayKind::direct: return "direct";
        case RayKind::reflection: return "reflection";
        case RayKind::diffraction: return "diffraction";
    }
    return "?";
}

Diffractability diffractability(const Vec3& origin, const Vec3& dir, const Wedge& wedge) {
    Diffractability result;
    result.approach = closest_approach(origin, dir, wedge);

    Vec3 to_edge = result.approach.on_edge - origin;
    double dist = to_edge.norm();
    if (dist < kSelfHitEpsilon) {
        // Origin sits on the edge: the ideal ray is undefined, the segment
        // trivially "hits" the edge.
        result.v_d = 1.0;
        return result;
    }
    double c = dir.dot(to_edge / dist);
    result.v_d = std::fmin(1.0, std::fmax(-1.0, c));
    return result;
}

bool shadow_region_test(const Wedge& wedge, const Vec3& incident, const Vec3& candidate) {
    ShadowSector sector = shadow_sector(wedge, incident);
    if (!sector.valid) return false;
    double a_c = air_angle(wedge, candidate, sector.mirrored);
    if (a_c < 0.0) return false;  // candidate parallel to the edge axis
    return a_c >= sector.start - kAngleTol && a_c <= sector.air_width + kAngleTol;
}

Vec3 cone_direction(const Wedge& wedge, double azimuth, double theta_d) {
    double sin_t = std::sin(theta_d);
    return wedge.ex * (std::cos(azimuth) * sin_t) + wedge.ey * (std::sin(azimuth) * sin_t) -
           wedge.ez * std::cos(theta_d);
}

std::vector<Vec3> diffraction_directions(const Wedge& wedge, const Vec3& incident,
                                         double theta_d, int n_d, double phi_margin) {
    std::vector<Vec3> dirs;
    if (n_d <= 0) return dirs;

    ShadowSector sector = shadow_sector(wedge, incident);
    if (!sector.valid) return dirs;

    double lo = sector.start + phi_margin;
    double hi = sector.air_width - phi_margin;
    if (hi <= lo) return dirs;  // sliver sector, nothing useful to emit

    double theta_off = (hi - lo) / (n_d + 1);
    dirs.reserve(n_d);
    for (int p = 1; p <= n_d; ++p) {
        double air = lo + p * theta_off;
        double azimuth = 0.5 * wedge.theta_w + air;
        if (sector.mirrored) azimuth = -azimuth;
        dirs.push_back(cone_direction(wedge, azimuth, theta_d));
    }
    return dirs;
}

namespace {

struct WedgeEvent {
    int wedge = -1;
    double v_d = 0.0;
    ClosestApproach approach;
};

// Single best diffraction event on a segment, if any: highest v_d above
// threshold, ties to the nearest edge point, then to the lowest wedge id
// (scan order).
WedgeEvent find_wedge_event(const Scene& scene, const Vec3& origin, const Vec3& dir,
                            double seg_len, double v_th) {
    WedgeEvent best;
    for (int i = 0; i < static_cast<int>(scene.wedges.size()); ++i) {
        Diffractability d = diffractability(origin, dir, scene.wedges[i]);
        const ClosestApproach& ca = d.approach;
        if (ca.degenerate) continue;
        // The event must happen along this segment: past the origin (not the
        // edge we may have just spawned from) and not beyond the surface hit.
        if (ca.ray_t <= kSelfHitEpsilon || ca.ray_t > seg_len + kSelfHitEpsilon) continue;
        if ((ca.on_edge - origin).norm() <= kSelfHitEpsilon) continue;
        if (d.v_d <= v_th) continue;

        if (best.wedge < 0 || d.v_d > best.v_d + 1e-12 ||
            (std::fabs(d.v_d - best.v_d) <= 1e-12 &&
             (ca.on_edge - origin).norm() < (best.approach.on_edge - origin).norm())) {
            best.wedge = i;
            best.v_d = d.v_d;
            best.approach = ca;
        }
    }
    return best;
}

void trace_recursive(const Scene& scene, const TraceConfig& config, RayPathTree& tree,
                     int parent, const Vec3& origin, const Vec3& dir, int order, RayKind kind) {
    auto hit = scene.bvh.intersect(origin, dir, config.max_ray_length);
    double seg_len = hit ? hit->distance : config.max_ray_length;

    bool expandable = order < config.max_order;

    // Diffraction spawns independently of the segment itself: the segment
    // always runs to its surface hit (or the length cap), and a confirmed
    // event adds children at the edge's closest-approach point. With
    // n_d == 0 detection is skipped entirely so the reflection-only
    // baseline is untouched by nearby edges.
    WedgeEvent event;
    std::vector<Vec3> fan;
    if (expandable && config.n_d > 0) {
        event = find_wedge_event(scene, origin, dir, seg_len, config.v_th);
        if (event.wedge >= 0) {
            const Wedge& w = scene.wedges[event.wedge];
            // Children keep the parent's along-edge motion: the cone formula
            // carries -cos(theta) on e_z, so feed it the supplement.
            double c = std::fmin(1.0, std::fmax(-1.0, dir.dot(w.ez)));
            double theta_param = std::acos(-c);
            fan = diffraction_directions(w, dir, theta_param, config.n_d, config.phi_margin);
        }
    }

    RayPathNode node;
    node.parent = parent;
    node.seg.origin = origin;
    node.seg.dir = dir;
    node.seg.length = seg_len;
    node.seg.order = order;
    node.seg.kind = kind;
    int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);

    if (!expandable) return;

    if (hit) {
        Vec3 refl = reflect(dir, hit->normal).normalized();
        trace_recursive(scene, config, tree, index, hit->point, refl, order + 1,
                        RayKind::reflection);
    }
    if (!fan.empty()) {
        Vec3 spawn = event.approach.on_edge;
        for (const Vec3& d : fan) {
            trace_recursive(scene, config, tree, index, spawn, d, order + 1,
                            RayKind::diffraction);
        }
    }
}

}  // namespace

RayPathTree trace_observation(const Scene& scene, const Observation& obs,
                              const TraceConfig& config) {
    RayPathTree tree;
    Vec3 dir = (-obs.direction).normalized();
    trace_recursive(scene, config, tree, -1, obs.listener.position, dir, 0, RayKind::direct);
    return tree;
}

std::vector<RayPathTree> trace_frame_serial(const Scene& scene,
                                            const std::vector<Observation>& obs,
                                            const TraceConfig& config) {
    if (!obs.empty()) {
        for (const Observation& o : obs) {
            if (o.frame != obs.front().frame) {
                throw ValidationError("trace_frame: observations span multiple frames");
            }
        }
    }
    std::vector<RayPathTree> trees(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        trees[i] = trace_observation(scene, obs[i], config);
        trees[i].observation = static_cast<int>(i);
    }
    return trees;
}

std::vector<RayPathTree> trace_frame(const Scene& scene, const std::vector<Observation>& obs,
                                     const TraceConfig& config) {
    if (!obs.empty()) {
        for (const Observation& o : obs) {
            if (o.frame != obs.front().frame) {
                throw ValidationError("trace_frame: observations span multiple frames");
            }
        }
    }
    std::vector<RayPathTree> trees(obs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t i = 0; i < obs.size(); ++i) {
        trees[i] = trace_observation(scene, obs[i], config);
        trees[i].observation = static_cast<int>(i);
    }
    return trees;
}

std::string ray_trees_to_csv(const std::vector<RayPathTree>& trees, int frame, bool header) {
    std::string out;
    if (header) out = "frame,obs,node,parent,kind,order,ox,oy,oz,dx,dy,dz,length\n";
    char line[320];
    for (const RayPathTree& tree : trees) {
        for (int n = 0; n < static_cast<int>(tree.nodes.size()); ++n) {
            const RayPathNode& node = tree.nodes[n];
            std::snprintf(line, sizeof(line),
                          "%d,%d,%d,%d,%s,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", frame,
                          tree.observation, n, node.parent, to_string(node.seg.kind),
                          node.seg.order, node.seg.origin.x, node.seg.origin.y, node.seg.origin.z,
                          node.seg.dir.x, node.seg.dir.y, node.seg.dir.z, node.seg.length);
            out += line;
        }
    }
    return out;
}

}  // namespace echoloc
