#pragma once

#include <optional>
#include <vector>

#include "echoloc/trace.hpp"

namespace echoloc {

/**
 * One ground-truth propagation path from source to listener.
 *
 * vertices runs source first, listener last; kinds has one entry per leg,
 * where a leg's kind names the event at its start (the leg leaving the
 * source is direct, a leg leaving a mirror point is reflection, a leg
 * leaving an edge is diffraction). The last kind is therefore the arrival
 * mechanism at the listener.
 */
struct ForwardPath {
    std::vector<Vec3> vertices;
    std::vector<RayKind> kinds;
    double length = 0.0;

    // Propagation direction of the final leg: how the sound arrives.
    Vec3 arrival_direction() const {
        std::size_t n = vertices.size();
        return (vertices[n - 1] - vertices[n - 2]).normalized();
    }
    RayKind arrival_kind() const { return kinds.back(); }
};

// Unoccluded straight shot, if the scene allows one.
std::optional<ForwardPath> direct_path(const Scene& scene, const Vec3& source,
                                       const Vec3& listener);

// All valid specular chains up to max_order bounces, found by mirroring the
// source across triangle planes and validating each bounce point (inside
// its triangle, every leg unoccluded). Consecutive bounces off the same
// triangle are skipped.
std::vector<ForwardPath> image_source_paths(const Scene& scene, const Vec3& source,
                                            const Vec3& listener, int max_order);

// Single-bend paths over each wedge: the edge point minimizing
// |S - e| + |e - L| (golden-section to 1e-9, clamped to the edge), kept when
// both legs are clear and the listener direction falls in the wedge's shadow
// of the incident leg. include_reflected also tries source -> one mirror ->
// edge -> listener.
std::vector<ForwardPath> diffraction_paths(const Scene& scene, const Vec3& source,
                                           const Vec3& listener, bool include_reflected = true);

// Edge point minimizing total travel source -> edge -> target; exposed for
// the dense-scan comparison tests.
Vec3 fermat_edge_point(const Wedge& wedge, const Vec3& source, const Vec3& target);

}  // namespace echoloc
