#include "doctest.h"

#include "echoloc/config.hpp"
#include "echoloc/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace echoloc;

namespace {

struct TempFile {
    std::string path;
    TempFile(const std::string& name, const std::string& text) {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path);
        out << text;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

const char* kScenarioText =
    "[scenario]\n"
    "mesh = room.obj\n"
    "listener = 3.0 5.4 1.5\n"
    "waypoint = 0 4.0 4.4 1.4\n"
    "waypoint = 8 4.7 1.0 1.4\n"
    "frame_rate = 5\n"
    "noise_deg = 3\n"
    "max_reflection_order = 1\n"
    "include_diffraction = yes\n";

}  // namespace

TEST_CASE("ini parser handles comments, sections and whitespace") {
    std::istringstream in(
        "# leading comment\n"
        "[run]\r\n"
        "  seed = 42   ; trailing comment\n"
        "\n"
        "mode=full\n");
    auto entries = parse_ini(in, "dialect");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].section == "run");
    CHECK(entries[0].key == "seed");
    CHECK(entries[0].value == "42");
    CHECK(entries[0].line == 3);
    CHECK(entries[1].key == "mode");
    CHECK(entries[1].value == "full");
}

TEST_CASE("ini parser rejects malformed lines with the line number") {
    auto expect_parse_error = [](const char* text, const char* needle) {
        std::istringstream in(text);
        try {
            parse_ini(in, "bad");
            FAIL("expected a throw for: ", text);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_parse_error("[unclosed\n", "bad:1");
    expect_parse_error("[]\n", "bad:1");
    expect_parse_error("key value\n", "bad:1");
    expect_parse_error("[ok]\n= value\n", "bad:2");
}

TEST_CASE("scenario files load with ini-relative mesh paths") {
    TempFile scn("echoloc_test_scn.ini", kScenarioText);
    Scenario s = load_scenario(scn.path);
    CHECK(s.mesh_path ==
          (std::filesystem::temp_directory_path() / "room.obj").lexically_normal().string());
    CHECK(distance(s.listener.position, Vec3{3.0, 5.4, 1.5}) < 1e-12);
    REQUIRE(s.trajectory.size() == 2);
    CHECK(s.trajectory[1].time == 8.0);
    CHECK(distance(s.trajectory[1].position, Vec3{4.7, 1.0, 1.4}) < 1e-12);
    CHECK(s.frame_rate == 5.0);
    CHECK(s.noise_sigma == doctest::Approx(deg_to_rad(3.0)));
    CHECK(s.max_reflection_order == 1);
    CHECK(s.include_diffraction);
}

TEST_CASE("scenario files reject unknown keys and missing requirements") {
    TempFile unknown("echoloc_test_unknown.ini",
                     std::string(kScenarioText) + "volume = 11\n");
    CHECK_THROWS_AS(load_scenario(unknown.path), ConfigError);

    TempFile no_mesh("echoloc_test_nomesh.ini",
                     "[scenario]\nlistener = 0 0 0\nwaypoint = 0 1 1 1\n");
    CHECK_THROWS_AS(load_scenario(no_mesh.path), ConfigError);

    TempFile no_listener("echoloc_test_nolis.ini",
                         "[scenario]\nmesh = m.obj\nwaypoint = 0 1 1 1\n");
    CHECK_THROWS_AS(load_scenario(no_listener.path), ConfigError);

    TempFile no_waypoint("echoloc_test_nowp.ini",
                         "[scenario]\nmesh = m.obj\nlistener = 0 0 0\n");
    CHECK_THROWS_AS(load_scenario(no_waypoint.path), ConfigError);

    TempFile bad_vec("echoloc_test_badvec.ini",
                     "[scenario]\nmesh = m.obj\nlistener = 0 0\nwaypoint = 0 1 1 1\n");
    CHECK_THROWS_AS(load_scenario(bad_vec.path), ConfigError);

    CHECK_THROWS_AS(load_scenario("/nonexistent/echoloc.ini"), ConfigError);
}

TEST_CASE("run config loads all sections and applies defaults") {
    TempFile scn("echoloc_test_run_scn.ini", kScenarioText);
    TempFile run("echoloc_test_run.ini",
                 "[run]\n"
                 "scenario = echoloc_test_run_scn.ini\n"
                 "mode = no-diffraction\n"
                 "seed = 9\n"
                 "budget_ms = 150\n"
                 "[trace]\n"
                 "n_d = 7\n"
                 "v_th = 0.9\n"
                 "[filter]\n"
                 "particles = 250\n"
                 "sigma_s = 0.25\n");
    RunConfig cfg = load_run_config(run.path);
    CHECK(cfg.mode == RunMode::no_diffraction);
    CHECK(cfg.seed == 9);
    CHECK(cfg.budget_ms == 150.0);
    CHECK(cfg.trace.n_d == 7);
    CHECK(cfg.trace.v_th == 0.9);
    CHECK(cfg.trace.max_order == 3);  // untouched default
    CHECK(cfg.filter.particle_count == 250);
    CHECK(cfg.filter.sigma_s == 0.25);
    CHECK(cfg.filter.sigma_d == 0.3);  // untouched default
    CHECK(cfg.scenario.max_reflection_order == 1);  // pulled in from the scenario
    // the disabled mode zeroes the fan without touching the config
    CHECK(effective_trace(cfg).n_d == 0);
    cfg.mode = RunMode::full;
    CHECK(effective_trace(cfg).n_d == 7);
}

TEST_CASE("run config rejects bad values") {
    TempFile scn("echoloc_test_rc_scn.ini", kScenarioText);
    auto with_run_text = [&](const std::string& text) {
        return "[run]\nscenario = echoloc_test_rc_scn.ini\n" + text;
    };
    TempFile bad_mode("echoloc_test_badmode.ini", with_run_text("mode = fancy\n"));
    CHECK_THROWS_AS(load_run_config(bad_mode.path), ConfigError);

    TempFile bad_nd("echoloc_test_badnd.ini", with_run_text("[trace]\nn_d = -1\n"));
    CHECK_THROWS_AS(load_run_config(bad_nd.path), ConfigError);

    TempFile bad_order("echoloc_test_badord.ini", with_run_text("[trace]\nmax_order = 0\n"));
    CHECK_THROWS_AS(load_run_config(bad_order.path), ConfigError);

    TempFile bad_budget("echoloc_test_badbud.ini", with_run_text("budget_ms = 0\n"));
    CHECK_THROWS_AS(load_run_config(bad_budget.path), ConfigError);

    TempFile bad_section("echoloc_test_badsec.ini", with_run_text("[tuning]\nx = 1\n"));
    CHECK_THROWS_AS(load_run_config(bad_section.path), ConfigError);

    TempFile no_scn("echoloc_test_noscn.ini", "[run]\nseed = 1\n");
    CHECK_THROWS_AS(load_run_config(no_scn.path), ConfigError);

    TempFile bad_int("echoloc_test_badint.ini", with_run_text("seed = soon\n"));
    CHECK_THROWS_AS(load_run_config(bad_int.path), ConfigError);
}

TEST_CASE("mode names round-trip") {
    CHECK(to_string(RunMode::full) == "full");
    CHECK(to_string(RunMode::no_diffraction) == "no-diffraction");
    CHECK(run_mode_from_string("full") == RunMode::full);
    CHECK(run_mode_from_string("no-diffraction") == RunMode::no_diffraction);
    CHECK_THROWS_AS(run_mode_from_string("half"), ConfigError);
}
