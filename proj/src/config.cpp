#include "echoloc/config.hpp"

#include "echoloc/errors.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace echoloc {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

std::string where(const std::string& file, int line) {
    return file + ":" + std::to_string(line) + ": ";
}

double entry_double(const IniEntry& e, const std::string& file) {
    try {
        std::size_t pos = 0;
        double v = std::stod(e.value, &pos);
        if (trim(e.value.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(where(file, e.line) + "expected a number for '" + e.key + "', got '" +
                      e.value + "'");
}

long long entry_int(const IniEntry& e, const std::string& file) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(e.value, &pos);
        if (trim(e.value.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(where(file, e.line) + "expected an integer for '" + e.key + "', got '" +
                      e.value + "'");
}

bool entry_bool(const IniEntry& e, const std::string& file) {
    const std::string& v = e.value;
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(where(file, e.line) + "expected a boolean for '" + e.key + "', got '" + v +
                      "'");
}

std::vector<double> entry_doubles(const IniEntry& e, const std::string& file, std::size_t count) {
    std::istringstream in(e.value);
    std::vector<double> out;
    double v;
    while (in >> v) out.push_back(v);
    if (!in.eof() || out.size() != count) {
        throw ConfigError(where(file, e.line) + "expected " + std::to_string(count) +
                          " numbers for '" + e.key + "', got '" + e.value + "'");
    }
    return out;
}

std::string resolve_relative(const std::string& base_file, const std::string& value) {
    std::filesystem::path p(value);
    if (p.is_absolute()) return value;
    return (std::filesystem::path(base_file).parent_path() / p).lexically_normal().string();
}

[[noreturn]] void unknown_key(const IniEntry& e, const std::string& file) {
    throw ConfigError(where(file, e.line) + "unknown key '" + e.key + "' in [" + e.section + "]");
}

}  // namespace

std::vector<IniEntry> parse_ini(std::istream& in, const std::string& name) {
    std::vector<IniEntry> entries;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(where(name, line_no) + "malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ParseError(where(name, line_no) + "empty section name");
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(where(name, line_no) + "expected 'key = value'");
        }
        IniEntry e;
        e.section = section;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = line_no;
        if (e.key.empty()) {
            throw ParseError(where(name, line_no) + "empty key");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string to_string(RunMode mode) {
    return mode == RunMode::full ? "full" : "no-diffraction";
}

RunMode run_mode_from_string(const std::string& text) {
    if (text == "full") return RunMode::full;
    if (text == "no-diffraction") return RunMode::no_diffraction;
    throw ConfigError("unknown mode '" + text + "' (expected 'full' or 'no-diffraction')");
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("file not found: " + path);
    std::vector<IniEntry> entries = parse_ini(in, path);

    Scenario s;
    bool have_mesh = false;
    bool have_listener = false;
    for (const IniEntry& e : entries) {
        if (e.section != "scenario") {
            throw ConfigError(where(path, e.line) + "unexpected section [" + e.section +
                              "] in a scenario file");
        }
        if (e.key == "mesh") {
            s.mesh_path = resolve_relative(path, e.value);
            have_mesh = true;
        } else if (e.key == "listener") {
            auto v = entry_doubles(e, path, 3);
            s.listener.position = {v[0], v[1], v[2]};
            have_listener = true;
        } else if (e.key == "listener_quat") {
            auto v = entry_doubles(e, path, 4);
            s.listener.orientation = {v[0], v[1], v[2], v[3]};
        } else if (e.key == "waypoint") {
            auto v = entry_doubles(e, path, 4);
            s.trajectory.push_back({v[0], {v[1], v[2], v[3]}});
        } else if (e.key == "frame_rate") {
            s.frame_rate = entry_double(e, path);
        } else if (e.key == "noise_deg") {
            s.noise_sigma = deg_to_rad(entry_double(e, path));
        } else if (e.key == "max_reflection_order") {
            s.max_reflection_order = static_cast<int>(entry_int(e, path));
        } else if (e.key == "include_diffraction") {
            s.include_diffraction = entry_bool(e, path);
        } else {
            unknown_key(e, path);
        }
    }
    if (!have_mesh) throw ConfigError(path + ": missing required key 'mesh'");
    if (!have_listener) throw ConfigError(path + ": missing required key 'listener'");
    if (s.trajectory.empty()) throw ConfigError(path + ": at least one 'waypoint' is required");
    validate_scenario(s);
    return s;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("file not found: " + path);
    std::vector<IniEntry> entries = parse_ini(in, path);

    RunConfig cfg;
    for (const IniEntry& e : entries) {
        if (e.section == "run") {
            if (e.key == "scenario") {
                cfg.scenario_path = resolve_relative(path, e.value);
            } else if (e.key == "mode") {
                try {
                    cfg.mode = run_mode_from_string(e.value);
                } catch (const ConfigError& err) {
                    throw ConfigError(where(path, e.line) + err.what());
                }
            } else if (e.key == "out") {
                cfg.out_dir = e.value;
            } else if (e.key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(entry_int(e, path));
            } else if (e.key == "threads") {
                cfg.threads = static_cast<int>(entry_int(e, path));
            } else if (e.key == "budget_ms") {
                cfg.budget_ms = entry_double(e, path);
            } else {
                unknown_key(e, path);
            }
        } else if (e.section == "trace") {
            if (e.key == "n_d") {
                cfg.trace.n_d = static_cast<int>(entry_int(e, path));
            } else if (e.key == "v_th") {
                cfg.trace.v_th = entry_double(e, path);
            } else if (e.key == "max_order") {
                cfg.trace.max_order = static_cast<int>(entry_int(e, path));
            } else if (e.key == "max_ray_length") {
                cfg.trace.max_ray_length = entry_double(e, path);
            } else if (e.key == "phi_margin_deg") {
                cfg.trace.phi_margin = deg_to_rad(entry_double(e, path));
            } else {
                unknown_key(e, path);
            }
        } else if (e.section == "filter") {
            if (e.key == "particles") {
                cfg.filter.particle_count = static_cast<int>(entry_int(e, path));
            } else if (e.key == "sigma_d") {
                cfg.filter.sigma_d = entry_double(e, path);
            } else if (e.key == "sigma_s") {
                cfg.filter.sigma_s = entry_double(e, path);
            } else if (e.key == "sigma_c") {
                cfg.filter.sigma_c = entry_double(e, path);
            } else {
                unknown_key(e, path);
            }
        } else {
            throw ConfigError(where(path, e.line) + "unknown section [" + e.section + "]");
        }
    }
    if (cfg.scenario_path.empty()) {
        throw ConfigError(path + ": missing required key 'scenario' in [run]");
    }
    cfg.scenario = load_scenario(cfg.scenario_path);
    if (cfg.trace.n_d < 0) throw ConfigError(path + ": n_d must be non-negative");
    if (cfg.trace.max_order < 1) throw ConfigError(path + ": max_order must be at least 1");
    if (cfg.budget_ms <= 0.0) throw ConfigError(path + ": budget_ms must be positive");
    return cfg;
}

}  // namespace echoloc
