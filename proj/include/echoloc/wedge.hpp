#pragma once

#include <string>
#include <vector>

#include "echoloc/mesh.hpp"
#include "echoloc/vec3.hpp"

namespace echoloc {

/**
 * Diffracting edge: two faces meeting at an interior (through-the-material)
 * dihedral angle theta_w < the extraction threshold.
 *
 * Local frame: e_z runs along the edge (a -> b), e_x bisects the material
 * dihedral (half-way between the two faces, pointing into the solid), and
 * e_y = e_z x e_x completes a right-handed basis. Azimuths around e_z are
 * measured from e_x toward e_y, so the two faces sit at +/- theta_w / 2 and
 * the open air spans the remaining 2*pi - theta_w.
 */
struct Wedge {
    Vec3 a, b;            // edge endpoints, a = lower vertex id
    int tri_a = -1;       // face whose in-plane direction sits at azimuth +theta_w/2
    int tri_b = -1;       // face at azimuth -theta_w/2
    double theta_w = 0.0; // interior dihedral, radians
    double length = 0.0;
    Vec3 ex, ey, ez;
};

// Interior dihedral threshold: edges flatter than this (or concave, whose
// material angle exceeds pi) do not diffract.
constexpr double kDefaultWedgeAngleLimit = 170.0 * kPi / 180.0;

// Scan every interior edge (exactly two incident triangles) and keep those
// whose material dihedral is below max_theta_w. Boundary edges are skipped;
// an edge with more than two incident triangles throws ValidationError
// naming the edge. Output is ordered by (vertex id a, vertex id b).
std::vector<Wedge> extract_wedges(const TriangleMesh& mesh,
                                  double max_theta_w = kDefaultWedgeAngleLimit);

// CSV rows: ax,ay,az,bx,by,bz,theta_w_deg,tri_a,tri_b (header included).
std::string wedges_to_csv(const std::vector<Wedge>& wedges);

/**
 * Closest pair between a ray (origin, unit dir, t >= 0) and the wedge edge
 * segment. on_ray/on_edge are the clamped minimizers; gap their distance.
 * A ray parallel to the edge has no unique minimizer: the pair is taken at
 * the ray origin and flagged degenerate.
 */
struct ClosestApproach {
    Vec3 on_edge;   // m_d, the edge point a diffraction would occur at
    Vec3 on_ray;    // m_n, the ray's nearest point
    double gap = 0.0;
    double ray_t = 0.0;   // parameter of on_ray along the ray
    double edge_t = 0.0;  // parameter of on_edge in [0, edge length]
    bool degenerate = false;
};

ClosestApproach closest_approach(const Vec3& origin, const Vec3& dir, const Vec3& edge_a,
                                 const Vec3& edge_b);

inline ClosestApproach closest_approach(const Vec3& origin, const Vec3& dir, const Wedge& w) {
    return closest_approach(origin, dir, w.a, w.b);
}

}  // namespace echoloc
