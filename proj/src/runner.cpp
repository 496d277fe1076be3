#include "echoloc/runner.hpp"

#include "echoloc/errors.hpp"
#include "echoloc/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace echoloc {

namespace {

constexpr std::uint64_t kSynthSalt = 1;
constexpr std::uint64_t kFilterSalt = 2;

double ms_between(std::chrono::steady_clock::time_point a,
                  std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

double mean_or_nan(double sum, int count) {
    return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write: " + path);
    return out;
}

}  // namespace

RunReport run_scenario(const Scene& scene, const RunConfig& cfg,
                       std::vector<FrameSynthesis>* captured) {
    Scenario scenario = cfg.scenario;
    scenario.seed = mix_seed(cfg.seed, kSynthSalt);
    validate_scenario(scenario);

#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif

    TraceConfig trace_cfg = effective_trace(cfg);
    FilterState state =
        init_particles(scene.mesh.bounds(), cfg.filter, mix_seed(cfg.seed, kFilterSalt));

    RunReport report;
    int n_frames = frame_count(scenario);
    report.rows.reserve(n_frames);

    double error_sum = 0.0, nlos_error_sum = 0.0, ms_sum = 0.0;
    long direct_sum = 0, reflection_sum = 0, diffraction_sum = 0;
    int nlos_estimates = 0;

    for (int f = 0; f < n_frames; ++f) {
        FrameSynthesis syn = synthesize_frame(scene, scenario, f);

        auto t0 = std::chrono::steady_clock::now();
        std::vector<RayPathTree> trees = trace_frame(scene, syn.observations, trace_cfg);
        auto t1 = std::chrono::steady_clock::now();
        StepResult step = filter_step(state, trees, cfg.filter, f);
        auto t2 = std::chrono::steady_clock::now();

        FrameRow row;
        row.frame = f;
        row.time = frame_time(scenario, f);
        row.truth = syn.source;
        row.nlos = syn.nlos;
        row.n_obs = static_cast<int>(syn.observations.size());
        for (const RayPathTree& tree : trees) {
            for (const RayPathNode& node : tree.nodes) {
                switch (node.seg.kind) {
                    case RayKind::direct: ++row.n_direct; break;
                    case RayKind::reflection: ++row.n_reflection; break;
                    case RayKind::diffraction: ++row.n_diffraction; break;
                }
            }
        }
        row.gv = step.gv;
        row.ess = step.ess;
        if (step.estimate) {
            row.has_estimate = true;
            row.estimate = step.estimate->position;
            row.error = distance(row.estimate, row.truth);
            ++report.frames_with_estimates;
            error_sum += row.error;
            if (row.nlos) {
                ++nlos_estimates;
                nlos_error_sum += row.error;
            }
        }
        if (row.nlos) ++report.nlos_frames;
        row.trace_ms = ms_between(t0, t1);
        row.filter_ms = ms_between(t1, t2);
        ms_sum += row.trace_ms + row.filter_ms;
        direct_sum += row.n_direct;
        reflection_sum += row.n_reflection;
        diffraction_sum += row.n_diffraction;

        report.rows.push_back(row);
        if (captured) captured->push_back(std::move(syn));
    }

    report.mean_error = mean_or_nan(error_sum, report.frames_with_estimates);
    report.mean_nlos_error = mean_or_nan(nlos_error_sum, nlos_estimates);
    if (n_frames > 0) {
        report.mean_direct = static_cast<double>(direct_sum) / n_frames;
        report.mean_reflection = static_cast<double>(reflection_sum) / n_frames;
        report.mean_diffraction = static_cast<double>(diffraction_sum) / n_frames;
        report.mean_frame_ms = ms_sum / n_frames;
        std::vector<double> totals;
        totals.reserve(n_frames);
        for (const FrameRow& row : report.rows) totals.push_back(row.trace_ms + row.filter_ms);
        std::sort(totals.begin(), totals.end());
        std::size_t mid = totals.size() / 2;
        report.median_frame_ms = totals.size() % 2 ? totals[mid]
                                                   : 0.5 * (totals[mid - 1] + totals[mid]);
    }
    return report;
}

void write_report_files(const RunReport& report, const RunConfig& cfg,
                        const std::vector<FrameSynthesis>& frames, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    char buf[512];

    {
        std::ofstream out = open_out(out_dir + "/observations.csv");
        observations_to_csv(out, frames, cfg.scenario.frame_rate);
    }
    {
        std::ofstream out = open_out(out_dir + "/frames.csv");
        out << "frame,time,true_x,true_y,true_z,nlos,n_obs,n_direct,n_reflection,n_diffraction,"
               "has_estimate,est_x,est_y,est_z,error_m,gv,ess\n";
        for (const FrameRow& r : report.rows) {
            double nan = std::numeric_limits<double>::quiet_NaN();
            std::snprintf(buf, sizeof buf,
                          "%d,%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,"
                          "%.17g,%.17g\n",
                          r.frame, r.time, r.truth.x, r.truth.y, r.truth.z, r.nlos ? 1 : 0,
                          r.n_obs, r.n_direct, r.n_reflection, r.n_diffraction,
                          r.has_estimate ? 1 : 0, r.has_estimate ? r.estimate.x : nan,
                          r.has_estimate ? r.estimate.y : nan, r.has_estimate ? r.estimate.z : nan,
                          r.error, r.gv, r.ess);
            out << buf;
        }
    }
    {
        std::ofstream out = open_out(out_dir + "/summary.csv");
        out << "mode,n_d,frames,frames_with_estimates,nlos_frames,mean_error_m,mean_nlos_error_m,"
               "mean_direct_rays,mean_reflection_rays,mean_diffraction_rays\n";
        std::snprintf(buf, sizeof buf, "%s,%d,%zu,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      to_string(cfg.mode).c_str(), effective_trace(cfg).n_d, report.rows.size(),
                      report.frames_with_estimates, report.nlos_frames, report.mean_error,
                      report.mean_nlos_error, report.mean_direct, report.mean_reflection,
                      report.mean_diffraction);
        out << buf;
    }
    {
        // plot data: localization error against time, estimate frames only
        std::ofstream out = open_out(out_dir + "/errors.csv");
        out << "time,error_m\n";
        for (const FrameRow& r : report.rows) {
            if (!r.has_estimate) continue;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.time, r.error);
            out << buf;
        }
    }
    {
        // wall-clock columns live here so the files above stay reproducible
        std::ofstream out = open_out(out_dir + "/timing.csv");
        out << "frame,trace_ms,filter_ms,total_ms,over_budget\n";
        for (const FrameRow& r : report.rows) {
            double total = r.trace_ms + r.filter_ms;
            std::snprintf(buf, sizeof buf, "%d,%.6g,%.6g,%.6g,%d\n", r.frame, r.trace_ms,
                          r.filter_ms, total, total > cfg.budget_ms ? 1 : 0);
            out << buf;
        }
    }
}

int cmd_wedges(const std::string& mesh_path, double max_angle_deg, const std::string& out_path) {
    TriangleMesh mesh = load_obj(mesh_path);
    std::vector<Wedge> wedges = extract_wedges(mesh, deg_to_rad(max_angle_deg));
    std::string csv = wedges_to_csv(wedges);
    if (out_path.empty() || out_path == "-") {
        std::cout << csv;
    } else {
        std::ofstream out = open_out(out_path);
        out << csv;
    }
    return 0;
}

// TODO: accept a prerecorded observations.csv instead of synthesizing;
// observations_from_csv already round-trips the format.
int cmd_run(const RunConfig& cfg) {
    Scene scene(load_obj(cfg.scenario.mesh_path));
    std::vector<FrameSynthesis> frames;
    RunReport report = run_scenario(scene, cfg, &frames);
    write_report_files(report, cfg, frames, cfg.out_dir);

    for (const FrameRow& r : report.rows) {
        double total = r.trace_ms + r.filter_ms;
        if (total > cfg.budget_ms) {
            std::cerr << "warning: frame " << r.frame << " took " << total << " ms (budget "
                      << cfg.budget_ms << " ms)\n";
        }
    }
    std::printf(
        "mode=%s frames=%zu estimates=%d nlos_frames=%d mean_error=%.3f m "
        "mean_nlos_error=%.3f m mean_frame=%.2f ms median_frame=%.2f ms\n",
        to_string(cfg.mode).c_str(), report.rows.size(), report.frames_with_estimates,
        report.nlos_frames, report.mean_error, report.mean_nlos_error, report.mean_frame_ms,
        report.median_frame_ms);
    std::printf("reports written to %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_sweep_nd(const RunConfig& cfg, const std::vector<int>& nd_values) {
    for (int nd : nd_values) {
        if (nd < 0) throw ConfigError("sweep n_d values must be non-negative");
    }
    Scene scene(load_obj(cfg.scenario.mesh_path));
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream sweep = open_out(cfg.out_dir + "/sweep.csv");
    sweep << "n_d,mean_error_m,mean_nlos_error_m,mean_frame_ms\n";

    char buf[256];
    for (int nd : nd_values) {
        RunConfig run_cfg = cfg;
        run_cfg.mode = RunMode::full;  // the sweep itself controls the fan size
        run_cfg.trace.n_d = nd;
        run_cfg.out_dir = cfg.out_dir + "/nd_" + std::to_string(nd);

        std::vector<FrameSynthesis> frames;
        RunReport report = run_scenario(scene, run_cfg, &frames);
        write_report_files(report, run_cfg, frames, run_cfg.out_dir);

        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.6g\n", nd, report.mean_error,
                      report.mean_nlos_error, report.mean_frame_ms);
        sweep << buf;
        std::printf("n_d=%d mean_error=%.3f m mean_nlos_error=%.3f m mean_frame=%.2f ms\n", nd,
                    report.mean_error, report.mean_nlos_error, report.mean_frame_ms);
    }
    std::printf("sweep written to %s/sweep.csv\n", cfg.out_dir.c_str());
    return 0;
}

}  // namespace echoloc
