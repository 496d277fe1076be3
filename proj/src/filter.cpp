#include "echoloc/filter.hpp"

#include <algorithm>
#include <cmath>

#include "echoloc/errors.hpp"

namespace echoloc {

double distance_weight(const Vec3& particle, const RaySegment& seg, double sigma_d) {
    Vec3 rel = particle - seg.origin;
    double t = rel.dot(seg.dir);
    if (t < 0.0 || t > seg.length) return 0.0;
    double g2 = (rel - seg.dir * t).norm2();
    return std::exp(-g2 / (2.0 * sigma_d * sigma_d));
}

double particle_likelihood(const Vec3& particle, const std::vector<RayPathTree>& trees,
                           double sigma_d) {
    double sum = 0.0;
    for (const RayPathTree& tree : trees) {
        double best = 0.0;
        for (const RayPathNode& node : tree.nodes) {
            double w = distance_weight(particle, node.seg, sigma_d);
            if (w > best) best = w;
        }
        sum += best;
    }
    return sum;
}

FlatSegments FlatSegments::from_trees(const std::vector<RayPathTree>& trees) {
    FlatSegments flat;
    flat.tree_offsets.reserve(trees.size() + 1);
    flat.tree_offsets.push_back(0);
    for (const RayPathTree& tree : trees) {
        for (const RayPathNode& node : tree.nodes) flat.segments.push_back(node.seg);
        flat.tree_offsets.push_back(static_cast<int>(flat.segments.size()));
    }
    return flat;
}

namespace {

double flat_likelihood(const Vec3& particle, const FlatSegments& flat, double sigma_d) {
    double sum = 0.0;
    for (std::size_t t = 0; t + 1 < flat.tree_offsets.size(); ++t) {
        double best = 0.0;
        for (int s = flat.tree_offsets[t]; s < flat.tree_offsets[t + 1]; ++s) {
            double w = distance_weight(particle, flat.segments[s], sigma_d);
            if (w > best) best = w;
        }
        sum += best;
    }
    return sum;
}

}  // namespace

void reweight_particles_serial(const std::vector<Particle>& particles, const FlatSegments& flat,
                               double sigma_d, std::vector<double>& weights) {
    weights.resize(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) {
        weights[i] = flat_likelihood(particles[i].position, flat, sigma_d);
    }
}

void reweight_particles(const std::vector<Particle>& particles, const FlatSegments& flat,
                        double sigma_d, std::vector<double>& weights) {
    weights.resize(particles.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t i = 0; i < particles.size(); ++i) {
        weights[i] = flat_likelihood(particles[i].position, flat, sigma_d);
    }
}

std::vector<int> systematic_resample_indices(const std::vector<double>& weights, double u01) {
    const int n = static_cast<int>(weights.size());
    std::vector<int> picks(n);
    double total = 0.0;
    for (double w : weights) total += w;

    int j = 0;
    double cum = weights.empty() ? 0.0 : weights[0];
    for (int k = 0; k < n; ++k) {
        double target = total * (u01 + k) / n;
        while (cum < target && j + 1 < n) cum += weights[++j];
        picks[k] = j;
    }
    return picks;
}

FilterState init_particles(const Aabb& scene_bounds, const FilterParams& params, uint64_t seed,
                           double margin) {
    if (params.particle_count < 2) {
        throw ConfigError("particle_count must be at least 2, got " +
                          std::to_string(params.particle_count));
    }
    FilterState state;
    state.bounds = scene_bounds.inflated(margin);
    state.rng.seed(seed);
    state.particles.resize(params.particle_count);

    std::uniform_real_distribution<double> ux(state.bounds.lo.x, state.bounds.hi.x);
    std::uniform_real_distribution<double> uy(state.bounds.lo.y, state.bounds.hi.y);
    std::uniform_real_distribution<double> uz(state.bounds.lo.z, state.bounds.hi.z);
    for (Particle& p : state.particles) {
        p.position = {ux(state.rng), uy(state.rng), uz(state.rng)};
        p.weight = 1.0 / params.particle_count;
    }
    return state;
}

double generalized_variance(const std::vector<Particle>& particles, Vec3* mean_out) {
    const double n = static_cast<double>(particles.size());
    Vec3 mean;
    for (const Particle& p : particles) mean += p.position;
    mean = mean / n;
    if (mean_out) *mean_out = mean;

    // Symmetric 3x3 covariance, population normalization.
    double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
    for (const Particle& p : particles) {
        Vec3 d = p.position - mean;
        xx += d.x * d.x; xy += d.x * d.y; xz += d.x * d.z;
        yy += d.y * d.y; yz += d.y * d.z; zz += d.z * d.z;
    }
    xx /= n; xy /= n; xz /= n; yy /= n; yz /= n; zz /= n;

    return xx * (yy * zz - yz * yz) - xy * (xy * zz - yz * xz) + xz * (xy * yz - yy * xz);
}

namespace {

void perturb(FilterState& state, double sigma_s) {
    std::normal_distribution<double> step(0.0, sigma_s);
    std::uniform_real_distribution<double> uz(-1.0, 1.0);
    std::uniform_real_distribution<double> uphi(0.0, 2.0 * kPi);
    for (Particle& p : state.particles) {
        double r = std::fabs(step(state.rng));
        double z = uz(state.rng);
        double phi = uphi(state.rng);
        double s = std::sqrt(std::fmax(0.0, 1.0 - z * z));
        p.position += Vec3{s * std::cos(phi), s * std::sin(phi), z} * r;
        p.position.x = std::clamp(p.position.x, state.bounds.lo.x, state.bounds.hi.x);
        p.position.y = std::clamp(p.position.y, state.bounds.lo.y, state.bounds.hi.y);
        p.position.z = std::clamp(p.position.z, state.bounds.lo.z, state.bounds.hi.z);
    }
}

void reseed_uniform(FilterState& state) {
    std::uniform_real_distribution<double> ux(state.bounds.lo.x, state.bounds.hi.x);
    std::uniform_real_distribution<double> uy(state.bounds.lo.y, state.bounds.hi.y);
    std::uniform_real_distribution<double> uz(state.bounds.lo.z, state.bounds.hi.z);
    double w = 1.0 / static_cast<double>(state.particles.size());
    for (Particle& p : state.particles) {
        p.position = {ux(state.rng), uy(state.rng), uz(state.rng)};
        p.weight = w;
    }
}

}  // namespace

StepResult filter_step(FilterState& state, const std::vector<RayPathTree>& trees,
                       const FilterParams& params, int frame) {
    StepResult result;
    const int n = static_cast<int>(state.particles.size());

    perturb(state, params.sigma_s);

    if (trees.empty()) {
        // Silent frame: nothing to weigh against, keep diffusing.
        result.gv = generalized_variance(state.particles);
        result.ess = static_cast<double>(n);
        return result;
    }

    FlatSegments flat = FlatSegments::from_trees(trees);
    std::vector<double> weights;
    reweight_particles(state.particles, flat, params.sigma_d, weights);

    double total = 0.0;
    for (double w : weights) total += w;

    if (total <= 0.0) {
        // Every particle fell off every ray; start over rather than resample
        // from a meaningless distribution.
        reseed_uniform(state);
        result.gv = generalized_variance(state.particles);
        result.ess = static_cast<double>(n);
        return result;
    }

    double sum_sq = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] /= total;
        sum_sq += weights[i] * weights[i];
        state.particles[i].weight = weights[i];
    }
    result.ess = 1.0 / sum_sq;

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<int> picks = systematic_resample_indices(weights, u01(state.rng));
    std::vector<Particle> next(state.particles.size());
    for (std::size_t k = 0; k < picks.size(); ++k) {
        next[k].position = state.particles[picks[k]].position;
        next[k].weight = 1.0 / n;
    }
    state.particles = std::move(next);

    Vec3 mean;
    result.gv = generalized_variance(state.particles, &mean);
    if (result.gv < params.sigma_c) {
        result.estimate = Estimate{frame, mean, result.gv};
    }
    return result;
}

}  // namespace echoloc
