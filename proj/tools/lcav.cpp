#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lcav/scenario.hpp"
#include "lcav/types.hpp"

namespace {

int run_command(const std::string& preset_id, const std::string& config_path,
                const std::string& out_path, const std::string& frame,
                double tail_eps, bool oracle_check, double tmax, int steps)
{
    lcav::ScenarioConfig config =
        preset_id.empty() ? lcav::parse_config_file(config_path) : lcav::preset(preset_id);
    if (!out_path.empty())
        config.out_path = out_path;
    if (!frame.empty()) {
        if (frame == "interaction")
            config.frame = lcav::Frame::interaction;
        else if (frame == "full")
            config.frame = lcav::Frame::full_phase;
        else
            throw lcav::config_error("--frame must be 'interaction' or 'full'");
    }
    if (tail_eps > 0.0)
        config.tail_eps = tail_eps;
    if (oracle_check)
        config.oracle_check = true;
    if (tmax >= 0.0)
        config.tmax = tmax;
    if (steps > 0)
        config.steps = steps;

    const lcav::ScenarioResult result = lcav::run_scenario(config);
    if (result.oracle_deviation >= 0.0)
        std::cerr << "oracle check passed: max amplitude deviation "
                  << result.oracle_deviation << "\n";

    if (config.out_path.empty()) {
        lcav::write_csv(std::cout, result.rows);
    } else {
        std::ofstream out(config.out_path, std::ios::binary);
        if (!out)
            throw lcav::config_error("cannot open output file '" + config.out_path + "'");
        lcav::write_csv(out, result.rows);
        if (!out)
            throw lcav::config_error("failed writing output file '" + config.out_path + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact dynamics of a three-level atom coupled to two nonlinear cavity "
                 "modes: entanglement entropy, two-mode inseparability, and quadrature "
                 "squeezing time series"};
    app.require_subcommand(1);

    std::string preset_id, config_path, out_path, frame;
    double tail_eps = -1.0, tmax = -1.0;
    int steps = 0;
    bool oracle_check = false;

    CLI::App* run = app.add_subcommand("run", "Evolve a scenario and emit CSV");
    CLI::Option* preset_opt = run->add_option("--preset", preset_id, "preset id");
    CLI::Option* config_opt = run->add_option("--config", config_path, "INI config path");
    preset_opt->excludes(config_opt);
    run->add_option("--out", out_path, "output CSV path (default stdout)");
    run->add_option("--frame", frame, "interaction|full");
    run->add_option("--tail-eps", tail_eps, "per-mode truncation tail budget");
    run->add_flag("--oracle-check", oracle_check,
                  "cross-check the engine against the brute-force reference first");
    run->add_option("--tmax", tmax, "grid end time in units of 1/lambda_L");
    run->add_option("--steps", steps, "number of grid points");

    std::string level = "fast";
    CLI::App* selftest = app.add_subcommand("selftest", "Run invariant checks");
    selftest->add_option("--level", level, "fast|full")
        ->check(CLI::IsMember({"fast", "full"}));

    std::string show_id;
    CLI::App* presets = app.add_subcommand("presets", "List preset ids");
    presets->add_option("--show", show_id, "print one preset as an INI config");

    try {
        app.parse(argc, argv);

        if (run->parsed()) {
            if (preset_id.empty() == config_path.empty())
                throw lcav::config_error("run needs exactly one of --preset or --config");
            return run_command(preset_id, config_path, out_path, frame, tail_eps,
                               oracle_check, tmax, steps);
        }
        if (selftest->parsed()) {
            lcav::SelfTestOptions options;
            options.level = level == "full" ? lcav::SelfTestOptions::Level::full
                                            : lcav::SelfTestOptions::Level::fast;
            return lcav::self_test(options, std::cout) ? 0 : 2;
        }
        if (presets->parsed()) {
            if (!show_id.empty()) {
                std::cout << lcav::serialize_config(lcav::preset(show_id));
            } else {
                for (const std::string& id : lcav::preset_ids())
                    std::cout << id << "\n";
            }
            return 0;
        }
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const lcav::consistency_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lcav::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
