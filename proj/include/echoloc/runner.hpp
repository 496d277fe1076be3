#pragma once

#include "echoloc/config.hpp"
#include "echoloc/filter.hpp"
#include "echoloc/scenario.hpp"
#include "echoloc/trace.hpp"

#include <limits>
#include <string>
#include <vector>

namespace echoloc {

struct FrameRow {
    int frame = 0;
    double time = 0.0;
    Vec3 truth;
    bool nlos = false;
    int n_obs = 0;
    // traced segment counts by kind, summed over the frame's trees
    int n_direct = 0;
    int n_reflection = 0;
    int n_diffraction = 0;
    bool has_estimate = false;
    Vec3 estimate;
    double error = std::numeric_limits<double>::quiet_NaN();
    double gv = 0.0;
    double ess = 0.0;
    double trace_ms = 0.0;
    double filter_ms = 0.0;
};

struct RunReport {
    std::vector<FrameRow> rows;
    int frames_with_estimates = 0;
    int nlos_frames = 0;
    // means over frames that emitted an estimate; NaN when none did
    double mean_error = std::numeric_limits<double>::quiet_NaN();
    double mean_nlos_error = std::numeric_limits<double>::quiet_NaN();
    // mean per-frame segment counts
    double mean_direct = 0.0;
    double mean_reflection = 0.0;
    double mean_diffraction = 0.0;
    // trace + filter wall time; synthesis is oracle bookkeeping, not counted
    double mean_frame_ms = 0.0;
    double median_frame_ms = 0.0;
};

// The frame loop: synthesize -> trace -> filter step. Sequential across
// frames (the filter carries state between them); tracing and reweighting
// fan out across threads internally. `captured`, when non-null, receives the
// synthesized frames for writing the observation stream.
RunReport run_scenario(const Scene& scene, const RunConfig& cfg,
                       std::vector<FrameSynthesis>* captured = nullptr);

// Writes observations.csv, frames.csv, summary.csv, errors.csv and
// timing.csv into out_dir. Everything except timing.csv is a pure function
// of (config, seed); timing holds the wall-clock columns so the rest stays
// byte-reproducible.
void write_report_files(const RunReport& report, const RunConfig& cfg,
                        const std::vector<FrameSynthesis>& frames, const std::string& out_dir);

// CLI entry points. Errors surface as exceptions; the binary maps them to
// exit codes (ConfigError/ParseError/ValidationError -> 2, the rest -> 1).
int cmd_wedges(const std::string& mesh_path, double max_angle_deg, const std::string& out_path);
int cmd_run(const RunConfig& cfg);
int cmd_sweep_nd(const RunConfig& cfg, const std::vector<int>& nd_values);

}  // namespace echoloc
