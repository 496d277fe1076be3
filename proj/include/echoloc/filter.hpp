#pragma once

#include <optional>
#include <random>
#include <vector>

#include "echoloc/trace.hpp"
#include "echoloc/vec3.hpp"

namespace echoloc {

struct FilterParams {
    int particle_count = 100;
    double sigma_d = 0.3;  // m, ray-distance likelihood width
    double sigma_s = 0.2;  // m, per-step perturbation scale
    double sigma_c = 0.5;  // generalized-variance convergence gate
};

struct Particle {
    Vec3 position;
    double weight = 0.0;
};

struct Estimate {
    int frame = 0;
    Vec3 position;
    double gv = 0.0;
};

struct FilterState {
    std::vector<Particle> particles;
    Aabb bounds;           // sampling volume: scene bounds grown by the margin
    std::mt19937_64 rng;
};

// Per-step diagnostics alongside the (possibly withheld) estimate.
struct StepResult {
    std::optional<Estimate> estimate;
    double gv = 0.0;   // generalized variance of the particle cloud
    double ess = 0.0;  // effective sample size of the pre-resample weights
};

// Gaussian segment weight: exp(-g^2 / (2 sigma_d^2)) where g is the
// particle's distance to its perpendicular foot on the segment's infinite
// line, gated to zero unless the foot parameter falls within [0, length].
double distance_weight(const Vec3& particle, const RaySegment& seg, double sigma_d);

// Sum over trees of the best segment weight within each tree.
double particle_likelihood(const Vec3& particle, const std::vector<RayPathTree>& trees,
                           double sigma_d);

// Ray segments of a frame flattened for the reweight kernel, grouped by tree.
struct FlatSegments {
    std::vector<RaySegment> segments;
    std::vector<int> tree_offsets;  // size = tree count + 1

    static FlatSegments from_trees(const std::vector<RayPathTree>& trees);
    bool empty() const { return segments.empty(); }
};

// weights[i] = likelihood of particles[i]; parallel over particles, and
// bit-identical to the serial twin.
void reweight_particles(const std::vector<Particle>& particles, const FlatSegments& flat,
                        double sigma_d, std::vector<double>& weights);
void reweight_particles_serial(const std::vector<Particle>& particles, const FlatSegments& flat,
                               double sigma_d, std::vector<double>& weights);

// One index per new particle, drawn from the normalized weights with the
// systematic (stratified single-uniform) scheme.
std::vector<int> systematic_resample_indices(const std::vector<double>& weights, double u01);

// Uniform cloud over the bounds; margin grows the scene box on every side.
// particle_count < 2 is a configuration error.
FilterState init_particles(const Aabb& scene_bounds, const FilterParams& params, uint64_t seed,
                           double margin = 0.5);

// Covariance determinant of the particle positions (population covariance).
double generalized_variance(const std::vector<Particle>& particles, Vec3* mean_out = nullptr);

/**
 * One filter iteration: perturb each particle by a half-normal step along a
 * uniformly random direction, reweight against the frame's ray trees,
 * systematic-resample, and emit the cloud mean as the estimate when the
 * generalized variance falls below sigma_c.
 *
 * A frame with no trees only diffuses (and never emits); a frame whose rays
 * give every particle zero weight reseeds the cloud uniformly.
 */
StepResult filter_step(FilterState& state, const std::vector<RayPathTree>& trees,
                       const FilterParams& params, int frame);

}  // namespace echoloc
