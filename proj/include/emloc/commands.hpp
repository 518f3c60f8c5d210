#pragma once

#include <optional>
#include <string>
#include <vector>

namespace emloc {

// Exit codes shared by all commands: 0 success, 2 configuration or input-format
// error, 3 runtime error, 4 initialization fix out of range. Diagnostics go to
// stderr; estimate data only ever goes to files.

struct CommonArgs {
    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

/// Runs the configured scenario and writes estimates.csv, truth.csv and result.json
/// (plus samples.csv / lia.csv when enabled) into the output directory.
int cmd_simulate(const CommonArgs& args);

/// Re-runs the estimator over a recorded sample stream with the given initialization
/// fix; writes estimates.csv and result.json.
int cmd_replay(const std::string& samples_csv, const std::string& handshake_json,
               const CommonArgs& args);

/// Fits the installation offset between paired truth and averaged-estimate points;
/// emits a JSON report.
int cmd_calibrate_offset(const std::string& truth_csv, const std::string& estimates_csv,
                         const std::optional<std::string>& out_path);

/// Estimates the reference mistuning from a recorded phase series; emits a JSON report.
int cmd_tune_frequency(const std::string& phase_csv, const std::optional<std::string>& out_path,
                       double stable_threshold_hz = 0.005);

/// Computes positioning metrics between an estimate file and a truth file; emits JSON.
int cmd_metrics(const std::string& estimates_csv, const std::string& truth_csv,
                const std::optional<std::string>& out_path);

} // namespace emloc
