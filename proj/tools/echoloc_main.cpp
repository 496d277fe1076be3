#include "CLI11.hpp"

#include "echoloc/config.hpp"
#include "echoloc/errors.hpp"
#include "echoloc/runner.hpp"

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Geometric-acoustics simulation and NLOS sound source localization"};
    app.require_subcommand(1);

    std::string mesh_path;
    std::string wedges_out;
    double max_angle_deg = 170.0;
    CLI::App* wedges = app.add_subcommand("wedges", "Extract diffracting edges from a mesh");
    wedges->add_option("mesh", mesh_path, "OBJ mesh file")->required();
    wedges->add_option("--max-angle", max_angle_deg,
                       "largest interior dihedral angle treated as a wedge, degrees");
    wedges->add_option("--out", wedges_out, "output CSV path (default stdout)");

    std::string config_path;
    std::string out_dir;
    std::string mode_text;
    std::uint64_t seed = 0;
    int threads = 0;
    std::vector<int> nd_values;

    CLI::App* run = app.add_subcommand("run", "Run a configured scenario end to end");
    run->add_option("--config", config_path, "run config file")->required();
    CLI::Option* run_out = run->add_option("--out", out_dir, "output directory override");
    CLI::Option* run_seed = run->add_option("--seed", seed, "rng seed override");
    CLI::Option* run_mode =
        run->add_option("--mode", mode_text, "'full' or 'no-diffraction' override");
    CLI::Option* run_threads = run->add_option("--threads", threads, "worker thread override");

    CLI::App* sweep = app.add_subcommand("sweep-nd", "Re-run a scenario across diffraction fan sizes");
    sweep->add_option("--config", config_path, "run config file")->required();
    CLI::Option* sweep_nd =
        sweep->add_option("--nd", nd_values, "fan sizes to sweep")->delimiter(',');
    CLI::Option* sweep_out = sweep->add_option("--out", out_dir, "output directory override");
    CLI::Option* sweep_seed = sweep->add_option("--seed", seed, "rng seed override");
    CLI::Option* sweep_threads = sweep->add_option("--threads", threads, "worker thread override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (wedges->parsed()) {
            return echoloc::cmd_wedges(mesh_path, max_angle_deg, wedges_out);
        }
        echoloc::RunConfig cfg = echoloc::load_run_config(config_path);
        if (run->parsed()) {
            if (run_out->count()) cfg.out_dir = out_dir;
            if (run_seed->count()) cfg.seed = seed;
            if (run_mode->count()) cfg.mode = echoloc::run_mode_from_string(mode_text);
            if (run_threads->count()) cfg.threads = threads;
            return echoloc::cmd_run(cfg);
        }
        if (sweep_out->count()) cfg.out_dir = out_dir;
        if (sweep_seed->count()) cfg.seed = seed;
        if (sweep_threads->count()) cfg.threads = threads;
        if (!sweep_nd->count()) nd_values = {0, 1, 2, 3, 5};
        return echoloc::cmd_sweep_nd(cfg, nd_values);
    } catch (const echoloc::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const echoloc::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const echoloc::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
