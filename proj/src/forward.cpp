#include "echoloc/forward.hpp"

#include <cmath>

namespace echoloc {

namespace {

constexpr double kGoldenTol = 1e-9;

// A travel-time minimum pinned to an edge endpoint is a corner graze, not a
// stationary edge solution; the ray model has no vertex diffraction, so such
// candidates are treated as no path.
bool interior_edge_point(const Wedge& wedge, const Vec3& e) {
    double t = (e - wedge.a).dot(wedge.ez);
    return t > 1e-6 && t < wedge.length - 1e-6;
}

bool segment_clear(const Scene& scene, const Vec3& a, const Vec3& b) {
    Vec3 diff = b - a;
    double len = diff.norm();
    // Endpoints may legitimately sit on surfaces (mirror points, edge
    // points); the self-hit epsilon at the start and a matching cap at the
    // end keep those from reading as occlusions.
    double cap = len - kSelfHitEpsilon;
    if (cap <= kSelfHitEpsilon) return true;
    return !scene.bvh.occluded(a, diff / len, cap);
}

Vec3 mirror_point(const TriangleMesh& mesh, int tri, const Vec3& p) {
    Vec3 a = mesh.vertices[mesh.triangles[tri].v[0]];
    Vec3 n = mesh.normals[tri];
    return p - n * (2.0 * n.dot(p - a));
}

bool point_in_triangle(const TriangleMesh& mesh, int tri, const Vec3& p) {
    const Triangle& t = mesh.triangles[tri];
    Vec3 a = mesh.vertices[t.v[0]];
    Vec3 ab = mesh.vertices[t.v[1]] - a;
    Vec3 ac = mesh.vertices[t.v[2]] - a;
    Vec3 ap = p - a;
    double d00 = ab.dot(ab), d01 = ab.dot(ac), d11 = ac.dot(ac);
    double d20 = ap.dot(ab), d21 = ap.dot(ac);
    double denom = d00 * d11 - d01 * d01;
    if (denom <= 0.0) return false;
    double v = (d11 * d20 - d01 * d21) / denom;
    double w = (d00 * d21 - d01 * d20) / denom;
    constexpr double tol = 1e-9;
    return v >= -tol && w >= -tol && v + w <= 1.0 + tol;
}

// Crossing of segment [from, to] with the plane of `tri`, requiring the
// crossing to fall strictly between the endpoints, inside the triangle, and
// approached from the side its normal faces.
std::optional<Vec3> bounce_point(const TriangleMesh& mesh, int tri, const Vec3& from,
                                 const Vec3& to) {
    Vec3 a = mesh.vertices[mesh.triangles[tri].v[0]];
    Vec3 n = mesh.normals[tri];
    double from_side = n.dot(from - a);
    double to_side = n.dot(to - a);
    double denom = from_side - to_side;
    if (std::fabs(denom) < 1e-14) return std::nullopt;
    double u = from_side / denom;
    if (u <= 1e-12 || u >= 1.0 - 1e-12) return std::nullopt;
    if (from_side <= 0.0) return std::nullopt;  // would hit the back of the face
    Vec3 q = from + (to - from) * u;
    if (!point_in_triangle(mesh, tri, q)) return std::nullopt;
    return q;
}

double path_length(const std::vector<Vec3>& vertices) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        len += (vertices[i + 1] - vertices[i]).norm();
    }
    return len;
}

// Walk one mirror sequence back from the listener; fills the bounce points
// in propagation order (source side first) or reports failure.
bool unfold_sequence(const Scene& scene, const Vec3& source, const Vec3& listener,
                     const std::vector<int>& seq, std::vector<Vec3>& bounces) {
    std::vector<Vec3> images(seq.size());
    Vec3 img = source;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        img = mirror_point(scene.mesh, seq[i], img);
        images[i] = img;
    }

    bounces.assign(seq.size(), Vec3{});
    Vec3 p = listener;
    for (int i = static_cast<int>(seq.size()) - 1; i >= 0; --i) {
        auto q = bounce_point(scene.mesh, seq[i], p, images[i]);
        if (!q) return false;
        bounces[i] = *q;
        p = *q;
    }

    // Occlusion last; it is the expensive part.
    Vec3 prev = source;
    for (const Vec3& q : bounces) {
        if (!segment_clear(scene, prev, q)) return false;
        prev = q;
    }
    return segment_clear(scene, prev, listener);
}

}  // namespace

std::optional<ForwardPath> direct_path(const Scene& scene, const Vec3& source,
                                       const Vec3& listener) {
    if (!segment_clear(scene, source, listener)) return std::nullopt;
    ForwardPath path;
    path.vertices = {source, listener};
    path.kinds = {RayKind::direct};
    path.length = (listener - source).norm();
    return path;
}

std::vector<ForwardPath> image_source_paths(const Scene& scene, const Vec3& source,
                                            const Vec3& listener, int max_order) {
    std::vector<ForwardPath> paths;
    const int tri_count = static_cast<int>(scene.mesh.triangles.size());
    std::vector<int> seq;
    std::vector<Vec3> bounces;

    // Depth-first over mirror sequences, no immediate same-triangle repeat.
    // The empty sequence is the zero-bounce (direct) chain.
    auto visit = [&](auto&& self, int depth) -> void {
        if (unfold_sequence(scene, source, listener, seq, bounces)) {
            ForwardPath path;
            path.vertices.reserve(seq.size() + 2);
            path.vertices.push_back(source);
            path.vertices.insert(path.vertices.end(), bounces.begin(), bounces.end());
            path.vertices.push_back(listener);
            path.kinds.assign(seq.size() + 1, RayKind::reflection);
            path.kinds[0] = RayKind::direct;
            path.length = path_length(path.vertices);
            paths.push_back(std::move(path));
        }
        if (depth == max_order) return;
        for (int t = 0; t < tri_count; ++t) {
            if (!seq.empty() && seq.back() == t) continue;
            seq.push_back(t);
            self(self, depth + 1);
            seq.pop_back();
        }
    };
    visit(visit, 0);
    return paths;
}

Vec3 fermat_edge_point(const Wedge& wedge, const Vec3& source, const Vec3& target) {
    Vec3 axis = (wedge.b - wedge.a) / wedge.length;
    auto travel = [&](double t) {
        Vec3 e = wedge.a + axis * t;
        return (e - source).norm() + (target - e).norm();
    };

    // Golden-section over the closed edge; the objective is convex, so this
    // lands on the interior optimum or the nearer endpoint.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = wedge.length;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = travel(x1), f2 = travel(x2);
    while (hi - lo > kGoldenTol) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = travel(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = travel(x2);
        }
    }
    return wedge.a + axis * (0.5 * (lo + hi));
}

std::vector<ForwardPath> diffraction_paths(const Scene& scene, const Vec3& source,
                                           const Vec3& listener, bool include_reflected) {
    std::vector<ForwardPath> paths;

    for (const Wedge& w : scene.wedges) {
        Vec3 e = fermat_edge_point(w, source, listener);
        if (!interior_edge_point(w, e)) continue;
        Vec3 incident = (e - source).normalized();
        Vec3 outgoing = (listener - e).normalized();
        if (!shadow_region_test(w, incident, outgoing)) continue;
        if (!segment_clear(scene, source, e) || !segment_clear(scene, e, listener)) continue;

        ForwardPath path;
        path.vertices = {source, e, listener};
        path.kinds = {RayKind::direct, RayKind::diffraction};
        path.length = path_length(path.vertices);
        paths.push_back(std::move(path));
    }

    if (!include_reflected) return paths;

    // One specular bounce feeding a wedge: unfold the source across the
    // mirror, run the same edge optimization against the image, then fold
    // the reflected leg back.
    const int tri_count = static_cast<int>(scene.mesh.triangles.size());
    for (int tri = 0; tri < tri_count; ++tri) {
        Vec3 image = mirror_point(scene.mesh, tri, source);
        for (const Wedge& w : scene.wedges) {
            if (tri == w.tri_a || tri == w.tri_b) continue;  // bounce off a wedge face into its own edge is a graze, not a path
            Vec3 e = fermat_edge_point(w, image, listener);
            if (!interior_edge_point(w, e)) continue;
            auto q = bounce_point(scene.mesh, tri, e, image);
            if (!q) continue;
            Vec3 incident = (e - *q).normalized();
            Vec3 outgoing = (listener - e).normalized();
            if (!shadow_region_test(w, incident, outgoing)) continue;
            if (!segment_clear(scene, source, *q) || !segment_clear(scene, *q, e) ||
                !segment_clear(scene, e, listener)) {
                continue;
            }

            ForwardPath path;
            path.vertices = {source, *q, e, listener};
            path.kinds = {RayKind::direct, RayKind::reflection, RayKind::diffraction};
            path.length = path_length(path.vertices);
            paths.push_back(std::move(path));
        }
    }
    return paths;
}

}  // namespace echoloc
