#pragma once

#include "echoloc/filter.hpp"
#include "echoloc/scenario.hpp"
#include "echoloc/trace.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace echoloc {

// Minimal INI dialect: [section] headers, key = value pairs, comments from
// '#' or ';' to end of line, repeated keys kept in order.
struct IniEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

std::vector<IniEntry> parse_ini(std::istream& in, const std::string& name);

enum class RunMode { full, no_diffraction };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& text);  // throws ConfigError

struct RunConfig {
    std::string scenario_path;
    Scenario scenario;  // loaded eagerly from scenario_path
    TraceConfig trace;
    FilterParams filter;
    RunMode mode = RunMode::full;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 0;  // 0 leaves the OpenMP default alone
    double budget_ms = 200.0;
};

// no-diffraction strips the diffraction fan, leaving the reflection-only
// tracer the comparison baseline uses.
inline TraceConfig effective_trace(const RunConfig& cfg) {
    TraceConfig tc = cfg.trace;
    if (cfg.mode == RunMode::no_diffraction) tc.n_d = 0;
    return tc;
}

// Scenario file: a single [scenario] section. Required keys: mesh (path,
// relative to the file), listener (x y z), waypoint (t x y z, repeatable).
// Optional: listener_quat (w x y z), frame_rate, noise_deg,
// max_reflection_order, include_diffraction.
Scenario load_scenario(const std::string& path);

// Run config file: [run] (scenario path required; mode, out, seed, threads,
// budget_ms optional), [trace] (n_d, v_th, max_order, max_ray_length,
// phi_margin_deg), [filter] (particles, sigma_d, sigma_s, sigma_c).
RunConfig load_run_config(const std::string& path);

}  // namespace echoloc
