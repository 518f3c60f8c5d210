#include <optional>
#include <string>

#include <CLI11.hpp>

#include "emloc/commands.hpp"

namespace {

void add_common(CLI::App* cmd, emloc::CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file");
    cmd->add_option("--seed", args.seed, "override the scenario RNG seed");
    cmd->add_option("--out-dir", args.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--override", args.overrides,
                    "config override as key.path=value (repeatable)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electromagnetic beacon localization: simulation, replay and calibration"};
    app.require_subcommand(1);

    emloc::CommonArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "run the configured scenario");
    add_common(sim, sim_args);

    emloc::CommonArgs replay_args;
    std::string replay_samples, replay_handshake;
    auto* replay = app.add_subcommand("replay", "run the estimator over a recorded stream");
    replay->add_option("samples", replay_samples, "samples.csv recorded stream")->required();
    replay->add_option("handshake", replay_handshake, "handshake.json initialization fix")
        ->required();
    add_common(replay, replay_args);

    std::string cal_truth, cal_est;
    std::optional<std::string> cal_out;
    auto* cal = app.add_subcommand("calibrate-offset",
                                   "fit the installation offset from paired point files");
    cal->add_option("truth", cal_truth, "truth points.csv")->required();
    cal->add_option("estimates", cal_est, "averaged estimate points.csv")->required();
    cal->add_option("--out", cal_out, "write the JSON report here instead of stdout");

    std::string tune_phase;
    std::optional<std::string> tune_out;
    double tune_threshold = 0.005;
    auto* tune = app.add_subcommand("tune-frequency",
                                    "estimate reference mistuning from a phase series");
    tune->add_option("phase", tune_phase, "phase.csv series")->required();
    tune->add_option("--out", tune_out, "write the JSON report here instead of stdout");
    tune->add_option("--stable-threshold", tune_threshold,
                     "|delta f| below this counts as stable, Hz")
        ->capture_default_str();

    std::string met_est, met_truth;
    std::optional<std::string> met_out;
    auto* met = app.add_subcommand("metrics", "positioning metrics for an estimate file");
    met->add_option("estimates", met_est, "estimates.csv")->required();
    met->add_option("truth", met_truth, "truth.csv")->required();
    met->add_option("--out", met_out, "write the JSON report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (sim->parsed())
        return emloc::cmd_simulate(sim_args);
    if (replay->parsed())
        return emloc::cmd_replay(replay_samples, replay_handshake, replay_args);
    if (cal->parsed())
        return emloc::cmd_calibrate_offset(cal_truth, cal_est, cal_out);
    if (tune->parsed())
        return emloc::cmd_tune_frequency(tune_phase, tune_out, tune_threshold);
    if (met->parsed())
        return emloc::cmd_metrics(met_est, met_truth, met_out);
    return 2;
}
