#include "echoloc/scenario.hpp"

#include "echoloc/errors.hpp"
#include "echoloc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace echoloc {

void validate_scenario(const Scenario& scenario) {
    if (scenario.trajectory.empty()) {
        throw ValidationError("scenario: trajectory is empty");
    }
    for (std::size_t i = 1; i < scenario.trajectory.size(); ++i) {
        if (!(scenario.trajectory[i].time > scenario.trajectory[i - 1].time)) {
            throw ValidationError("scenario: trajectory times must be strictly increasing");
        }
    }
    if (!(scenario.frame_rate > 0.0)) {
        throw ValidationError("scenario: frame_rate must be positive");
    }
    if (scenario.noise_sigma < 0.0) {
        throw ValidationError("scenario: noise_sigma must be non-negative");
    }
    if (scenario.max_reflection_order < 0) {
        throw ValidationError("scenario: max_reflection_order must be non-negative");
    }
}

int frame_count(const Scenario& scenario) {
    double span = scenario.trajectory.back().time;
    return static_cast<int>(std::floor(span * scenario.frame_rate + 1e-9)) + 1;
}

Vec3 interpolate_trajectory(const std::vector<TrajectoryPoint>& trajectory, double t) {
    if (t <= trajectory.front().time) return trajectory.front().position;
    if (t >= trajectory.back().time) return trajectory.back().position;
    auto after = std::upper_bound(
        trajectory.begin(), trajectory.end(), t,
        [](double value, const TrajectoryPoint& p) { return value < p.time; });
    auto before = after - 1;
    double u = (t - before->time) / (after->time - before->time);
    return before->position + (after->position - before->position) * u;
}

Vec3 perturb_direction(const Vec3& dir, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0.0) return dir;
    std::normal_distribution<double> gauss(0.0, sigma);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double angle = std::fabs(gauss(rng));
    double phi = 2.0 * kPi * uniform(rng);
    Vec3 p1 = any_perpendicular(dir);
    Vec3 p2 = cross(dir, p1);
    Vec3 axis = p1 * std::cos(phi) + p2 * std::sin(phi);
    return rotate_about(dir, axis, angle).normalized();
}

FrameSynthesis synthesize_frame(const Scene& scene, const Scenario& scenario, int frame) {
    double t = frame_time(scenario, frame);
    FrameSynthesis out;
    out.source = interpolate_trajectory(scenario.trajectory, t);
    const Vec3& listener = scenario.listener.position;

    // Zero-bounce chain in the image-source set is the direct path.
    std::vector<ForwardPath> paths =
        image_source_paths(scene, out.source, listener, scenario.max_reflection_order);
    out.nlos = std::none_of(paths.begin(), paths.end(), [](const ForwardPath& p) {
        return p.kinds.size() == 1;
    });
    if (scenario.include_diffraction) {
        std::vector<ForwardPath> bent = diffraction_paths(scene, out.source, listener, true);
        paths.insert(paths.end(), bent.begin(), bent.end());
    }

    std::mt19937_64 rng(mix_seed(scenario.seed, static_cast<std::uint64_t>(frame)));
    out.observations.reserve(paths.size());
    out.arrival_kinds.reserve(paths.size());
    for (const ForwardPath& path : paths) {
        Observation obs;
        obs.frame = frame;
        obs.listener = scenario.listener;
        obs.direction = perturb_direction(path.arrival_direction(), scenario.noise_sigma, rng);
        out.observations.push_back(obs);
        out.arrival_kinds.push_back(path.arrival_kind());
    }
    return out;
}

std::vector<FrameSynthesis> emit_frames(const Scene& scene, const Scenario& scenario) {
    validate_scenario(scenario);
    int n = frame_count(scenario);
    std::vector<FrameSynthesis> frames;
    frames.reserve(n);
    for (int f = 0; f < n; ++f) {
        frames.push_back(synthesize_frame(scene, scenario, f));
    }
    return frames;
}

void observations_to_csv(std::ostream& out, const std::vector<FrameSynthesis>& frames,
                         double frame_rate) {
    out << "frame,time,lx,ly,lz,qw,qx,qy,qz,dx,dy,dz\n";
    char buf[512];
    for (std::size_t f = 0; f < frames.size(); ++f) {
        double t = static_cast<double>(f) / frame_rate;
        for (const Observation& obs : frames[f].observations) {
            const Pose& l = obs.listener;
            std::snprintf(buf, sizeof buf,
                          "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          obs.frame, t, l.position.x, l.position.y, l.position.z,
                          l.orientation.w, l.orientation.x, l.orientation.y, l.orientation.z,
                          obs.direction.x, obs.direction.y, obs.direction.z);
            out << buf;
        }
    }
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

std::vector<std::vector<Observation>> observations_from_csv(std::istream& in,
                                                            const std::string& name) {
    std::vector<std::vector<Observation>> frames;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("frame,", 0) == 0) continue;

        std::vector<std::string> fields = split_csv_row(line);
        if (fields.size() != 12) {
            throw ParseError(name + ":" + std::to_string(line_no) + ": expected 12 fields, got " +
                             std::to_string(fields.size()));
        }
        Observation obs;
        try {
            obs.frame = std::stoi(fields[0]);
            // fields[1] is the timestamp, redundant with frame / frame_rate
            obs.listener.position = {std::stod(fields[2]), std::stod(fields[3]),
                                     std::stod(fields[4])};
            obs.listener.orientation = {std::stod(fields[5]), std::stod(fields[6]),
                                        std::stod(fields[7]), std::stod(fields[8])};
            obs.direction = {std::stod(fields[9]), std::stod(fields[10]), std::stod(fields[11])};
        } catch (const std::exception&) {
            throw ParseError(name + ":" + std::to_string(line_no) + ": malformed number");
        }
        if (obs.frame < 0) {
            throw ParseError(name + ":" + std::to_string(line_no) + ": negative frame id");
        }
        double len = obs.direction.norm();
        if (len < 1e-12) {
            throw ParseError(name + ":" + std::to_string(line_no) + ": zero direction");
        }
        obs.direction = obs.direction / len;
        if (obs.frame >= static_cast<int>(frames.size())) {
            frames.resize(obs.frame + 1);
        }
        frames[obs.frame].push_back(obs);
    }
    return frames;
}

}  // namespace echoloc
