#pragma once

#include "echoloc/forward.hpp"
#include "echoloc/observation.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace echoloc {

struct TrajectoryPoint {
    double time = 0.0;  // seconds
    Vec3 position;
};

// A synthetic experiment: where the listener sits, where the source moves,
// and how noisy the arrival directions are.
struct Scenario {
    std::string mesh_path;
    Pose listener;
    std::vector<TrajectoryPoint> trajectory;  // strictly increasing times
    double frame_rate = 5.0;                  // Hz
    double noise_sigma = deg_to_rad(3.0);     // angular std, radians
    int max_reflection_order = 2;
    bool include_diffraction = true;
    std::uint64_t seed = 1;
};

// Throws ValidationError on empty/non-monotone trajectory, non-positive
// frame rate, negative noise or reflection order.
void validate_scenario(const Scenario& scenario);

// Frames cover t = 0 .. last trajectory time inclusive at the frame rate.
int frame_count(const Scenario& scenario);
inline double frame_time(const Scenario& scenario, int frame) {
    return static_cast<double>(frame) / scenario.frame_rate;
}

// Piecewise-linear in time, clamped at both ends.
Vec3 interpolate_trajectory(const std::vector<TrajectoryPoint>& trajectory, double t);

// Rotates dir by |N(0, sigma)| about a uniformly random perpendicular axis.
// Draws nothing when sigma <= 0.
Vec3 perturb_direction(const Vec3& dir, double sigma, std::mt19937_64& rng);

struct FrameSynthesis {
    std::vector<Observation> observations;  // one per forward path, noisy
    std::vector<RayKind> arrival_kinds;     // final-leg kind per observation
    Vec3 source;                            // ground-truth position this frame
    bool nlos = false;                      // true when no direct path exists
};

// Gathers every forward path at the frame's interpolated source position and
// converts final legs into arrival directions. Noise draws come from a
// per-frame generator seeded by mix_seed(scenario.seed, frame), so frames
// are independent and the whole stream is reproducible.
FrameSynthesis synthesize_frame(const Scene& scene, const Scenario& scenario, int frame);

std::vector<FrameSynthesis> emit_frames(const Scene& scene, const Scenario& scenario);

// Observation stream format, one row per observation:
//   frame,time,lx,ly,lz,qw,qx,qy,qz,dx,dy,dz
// Silent frames produce no rows. The loader groups rows by frame id (size =
// max id + 1) and normalizes directions, so the file can be written by hand
// to feed externally measured arrival directions through the pipeline.
void observations_to_csv(std::ostream& out, const std::vector<FrameSynthesis>& frames,
                         double frame_rate);
std::vector<std::vector<Observation>> observations_from_csv(std::istream& in,
                                                            const std::string& name);

}  // namespace echoloc
