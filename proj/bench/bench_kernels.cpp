// Microbenchmark for the two OpenMP kernels against their serial twins.
// Self-timed; prints one line per kernel with the speedup. Not a test: run
// it by hand when touching the hot paths.
#include "echoloc/filter.hpp"
#include "echoloc/scenario.hpp"
#include "echoloc/scene_builders.hpp"
#include "echoloc/trace.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

using namespace echoloc;

namespace {

template <typename F>
double best_ms(F&& body, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        body();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main() {
    Scene scene(make_room_with_box());
    Scenario scenario;
    scenario.listener.position = {3.0, 5.4, 1.5};
    scenario.trajectory = {{0.0, {4.0, 4.4, 1.4}}};
    scenario.max_reflection_order = 2;

    // widen the workload beyond one frame's worth of arrivals so the
    // parallel loop has something to chew on
    FrameSynthesis synth = synthesize_frame(scene, scenario, 0);
    std::vector<Observation> observations;
    for (int rep = 0; rep < 16; ++rep)
        observations.insert(observations.end(), synth.observations.begin(),
                            synth.observations.end());

    TraceConfig tc;
    std::vector<RayPathTree> trees;
    double trace_par = best_ms([&] { trees = trace_frame(scene, observations, tc); }, 20);
    double trace_ser = best_ms([&] { trees = trace_frame_serial(scene, observations, tc); }, 20);

    FlatSegments flat = FlatSegments::from_trees(trees);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Particle> particles(20000);
    for (Particle& p : particles) p.position = {u(rng) * 7.0, u(rng) * 7.0, u(rng) * 3.0};
    std::vector<double> weights;
    double rew_par = best_ms([&] { reweight_particles(particles, flat, 0.3, weights); }, 50);
    double rew_ser =
        best_ms([&] { reweight_particles_serial(particles, flat, 0.3, weights); }, 50);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("threads: %d\n", threads);
    std::printf("trace_frame      %4zu observations: parallel %8.3f ms  serial %8.3f ms  speedup %.2fx\n",
                observations.size(), trace_par, trace_ser, trace_ser / trace_par);
    std::printf("reweight         %4zu particles x %zu segments: parallel %8.3f ms  serial %8.3f ms  speedup %.2fx\n",
                particles.size(), flat.segments.size(), rew_par, rew_ser, rew_ser / rew_par);
    return 0;
}
