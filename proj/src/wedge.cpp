#include "echoloc/wedge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "echoloc/errors.hpp"

namespace echoloc {

namespace {

// In-plane direction of a face at the edge: from the edge line toward the
// triangle's third vertex, perpendicular to the edge axis.
Vec3 face_direction(const TriangleMesh& mesh, int tri, const EdgeKey& edge, const Vec3& edge_origin,
                    const Vec3& axis) {
    const Triangle& t = mesh.triangles[tri];
    int wing = -1;
    for (int k = 0; k < 3; ++k) {
        if (t.v[k] != edge.a && t.v[k] != edge.b) wing = t.v[k];
    }
    Vec3 to_wing = mesh.vertices[wing] - edge_origin;
    Vec3 perp = to_wing - axis * axis.dot(to_wing);
    return perp.normalized();
}

}  // namespace

std::vector<Wedge> extract_wedges(const TriangleMesh& mesh, double max_theta_w) {
    std::vector<Wedge> wedges;
    auto adjacency = mesh.edge_adjacency();  // ordered by (a, b), so output is too

    for (const auto& [edge, tris] : adjacency) {
        if (tris.size() == 1) continue;  // boundary edge: nothing to bend around
        if (tris.size() > 2) {
            throw ValidationError("edge (" + std::to_string(edge.a) + ", " + std::to_string(edge.b) +
                                  ") is shared by " + std::to_string(tris.size()) +
                                  " triangles; mesh is not edge-manifold");
        }

        Vec3 a = mesh.vertices[edge.a];
        Vec3 b = mesh.vertices[edge.b];
        Vec3 axis = (b - a).normalized();

        Vec3 u1 = face_direction(mesh, tris[0], edge, a, axis);
        Vec3 u2 = face_direction(mesh, tris[1], edge, a, axis);

        // Dihedral through the solid. The half-plane directions give the
        // angle between the faces; whether the material fills that angle or
        // its reflex complement is decided by which side of each face the
        // other face's direction falls on (normals point away from the
        // material).
        double theta = angle_between(u1, u2);
        double side = u1.dot(mesh.normals[tris[1]]) + u2.dot(mesh.normals[tris[0]]);
        double theta_w = side <= 0.0 ? theta : 2.0 * kPi - theta;
        if (theta_w >= max_theta_w) continue;

        Wedge w;
        w.a = a;
        w.b = b;
        w.theta_w = theta_w;
        w.length = (b - a).norm();
        w.ez = axis;
        w.ex = (u1 + u2).normalized();  // bisector, into the material
        w.ey = w.ez.cross(w.ex);
        // Faces sit at azimuth +/- theta_w/2; record which triangle is which
        // so the +e_y face is always tri_a.
        if (u1.dot(w.ey) >= 0.0) {
            w.tri_a = tris[0];
            w.tri_b = tris[1];
        } else {
            w.tri_a = tris[1];
            w.tri_b = tris[0];
        }
        wedges.push_back(w);
    }
    return wedges;
}

std::string wedges_to_csv(const std::vector<Wedge>& wedges) {
    std::string out = "ax,ay,az,bx,by,bz,theta_w_deg,tri_a,tri_b\n";
    char line[256];
    for (const Wedge& w : wedges) {
        std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d\n",
                      w.a.x, w.a.y, w.a.z, w.b.x, w.b.y, w.b.z,
                      rad_to_deg(w.theta_w), w.tri_a, w.tri_b);
        out += line;
    }
    return out;
}

ClosestApproach closest_approach(const Vec3& origin, const Vec3& dir, const Vec3& edge_a,
                                 const Vec3& edge_b) {
    // Clamped ray/segment closest pair (segment parameter s in [0, L],
    // ray parameter t in [0, inf)).
    Vec3 e = edge_b - edge_a;
    double edge_len = e.norm();
    Vec3 eu = edge_len > 0.0 ? e / edge_len : Vec3{0, 0, 0};

    Vec3 w0 = origin - edge_a;
    double d_dot_e = dir.dot(eu);
    double denom = 1.0 - d_dot_e * d_dot_e;  // sin^2 of the angle between lines

    ClosestApproach result;
    if (denom < 1e-12) {
        // Parallel: every t gives the same gap; pin the pair at the ray origin.
        result.degenerate = true;
        result.ray_t = 0.0;
        result.on_ray = origin;
        result.edge_t = std::clamp(w0.dot(eu), 0.0, edge_len);
    } else {
        double a_proj = dir.dot(w0);
        double b_proj = eu.dot(w0);

        // Unconstrained line/line minimizer. If it violates a bound, the
        // constrained minimum sits on one of the three boundary faces
        // (t = 0, s = 0, s = L); evaluate the per-face optima and keep the
        // best. Cheap, and exact for every corner case.
        double t0 = (d_dot_e * b_proj - a_proj) / denom;
        double s0 = (b_proj - d_dot_e * a_proj) / denom;

        double best_t = 0.0;
        double best_s = 0.0;
        if (t0 >= 0.0 && s0 >= 0.0 && s0 <= edge_len) {
            best_t = t0;
            best_s = s0;
        } else {
            auto gap2 = [&](double t, double s) {
                Vec3 diff = w0 + dir * t - eu * s;
                return diff.norm2();
            };
            double candidates[3][2] = {
                {0.0, std::clamp(b_proj, 0.0, edge_len)},           // t = 0
                {std::max(0.0, -a_proj), 0.0},                      // s = 0
                {std::max(0.0, edge_len * d_dot_e - a_proj), edge_len},  // s = L
            };
            double best = gap2(candidates[0][0], candidates[0][1]);
            best_t = candidates[0][0];
            best_s = candidates[0][1];
            for (int i = 1; i < 3; ++i) {
                double g = gap2(candidates[i][0], candidates[i][1]);
                if (g < best) {
                    best = g;
                    best_t = candidates[i][0];
                    best_s = candidates[i][1];
                }
            }
        }
        result.ray_t = best_t;
        result.edge_t = best_s;
        result.on_ray = origin + dir * best_t;
    }
    result.on_edge = edge_a + eu * result.edge_t;
    result.gap = (result.on_edge - result.on_ray).norm();
    return result;
}

}  // namespace echoloc
