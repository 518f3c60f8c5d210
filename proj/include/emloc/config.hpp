#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emloc/pipeline.hpp"
#include "emloc/simulator.hpp"

namespace emloc {

struct OutputOptions {
    bool emit_samples = false; // record the generated stream (replayable)
    bool emit_lia = false;     // record demodulated amplitudes and phases
};

/// Everything one run needs: scenario, solver model inputs and thresholds.
struct RunConfig {
    Scenario scenario;
    PipelineOptions pipeline;
    OutputOptions output;
};

/// Stock configuration: the reference beacon and sensor, default thresholds, the
/// default static grid scenario.
RunConfig default_config();

/// Parses and validates a config document against the defaults. Unknown keys are
/// rejected with their full path. Missing sections and keys fall back to defaults,
/// except that a "beacon" section, when present, must name its coils.
RunConfig config_from_json(const nlohmann::json& doc);

nlohmann::json config_to_json(const RunConfig& config);

RunConfig load_config(const std::string& path);

/// Applies a dotted-path override such as "scenario.kind=custom" or
/// "pipeline.gate_gauss=0.5". Values parse as JSON, falling back to a string.
void apply_override(nlohmann::json& doc, const std::string& key_equals_value);

} // namespace emloc
