#include "emloc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "emloc/errors.hpp"

namespace emloc {

namespace {

using nlohmann::json;

constexpr const char* kSchema = "emloc-config/1";

void reject_unknown_keys(const json& node, const json& reference, const std::string& path) {
    if (!node.is_object())
        return;
    for (const auto& [key, value] : node.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!reference.is_object() || !reference.contains(key))
            throw ConfigError("unknown config key '" + here + "'");
        // arrays of objects (coils, waypoints) are validated against their first element
        const json& ref_child = reference.at(key);
        if (value.is_object()) {
            reject_unknown_keys(value, ref_child, here);
        } else if (value.is_array() && ref_child.is_array() && !ref_child.empty()
                   && ref_child.front().is_object()) {
            for (std::size_t i = 0; i < value.size(); ++i)
                reject_unknown_keys(value[i], ref_child.front(), here + "[" + std::to_string(i) + "]");
        }
    }
}

double num(const json& node, const char* key, double fallback) {
    if (!node.contains(key))
        return fallback;
    if (!node.at(key).is_number())
        throw ConfigError(std::string("config key '") + key + "' must be a number");
    return node.at(key).get<double>();
}

bool flag(const json& node, const char* key, bool fallback) {
    if (!node.contains(key))
        return fallback;
    if (!node.at(key).is_boolean())
        throw ConfigError(std::string("config key '") + key + "' must be a boolean");
    return node.at(key).get<bool>();
}

Vec3 vec3(const json& node, const std::string& where) {
    if (!node.is_array() || node.size() != 3)
        throw ConfigError("config key '" + where + "' must be a 3-element array");
    return Vec3(node[0].get<double>(), node[1].get<double>(), node[2].get<double>());
}

Attitude attitude_from(const json& node, const Attitude& fallback) {
    Attitude a = fallback;
    a.roll_rad = num(node, "roll_rad", a.roll_rad);
    a.pitch_rad = num(node, "pitch_rad", a.pitch_rad);
    a.yaw_rad = num(node, "yaw_rad", a.yaw_rad);
    return a;
}

json attitude_to(const Attitude& a) {
    return json{{"roll_rad", a.roll_rad}, {"pitch_rad", a.pitch_rad}, {"yaw_rad", a.yaw_rad}};
}

json vec3_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Scenario::Kind kind_from(const std::string& s) {
    if (s == "static-grid")
        return Scenario::Kind::static_grid;
    if (s == "dynamic-path")
        return Scenario::Kind::dynamic_path;
    if (s == "custom")
        return Scenario::Kind::custom;
    throw ConfigError("scenario.kind must be one of static-grid, dynamic-path, custom");
}

const char* kind_to(Scenario::Kind k) {
    switch (k) {
    case Scenario::Kind::static_grid: return "static-grid";
    case Scenario::Kind::dynamic_path: return "dynamic-path";
    case Scenario::Kind::custom: return "custom";
    }
    return "static-grid";
}

} // namespace

RunConfig default_config() {
    RunConfig c;
    c.scenario.kind = Scenario::Kind::static_grid;
    c.scenario.grid.points = default_static_grid();
    c.scenario.path.waypoints = default_dynamic_waypoints();
    return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
    json coils = json::array();
    for (const auto& coil : c.scenario.beacon.coils) {
        coils.push_back(json{{"area_m2", coil.area_m2},
                             {"turns", coil.turns},
                             {"current_a", coil.current_a},
                             {"freq_hz", coil.freq_hz},
                             {"phase_rad", coil.phase_rad},
                             {"axis", vec3_to(coil.axis)}});
    }
    json points = json::array();
    for (const auto& p : c.scenario.grid.points)
        points.push_back(vec3_to(p));
    json waypoints = json::array();
    for (const auto& p : c.scenario.path.waypoints)
        waypoints.push_back(vec3_to(p));

    json doc;
    doc["schema"] = kSchema;
    doc["seed"] = c.scenario.seed;
    doc["beacon"] = json{{"core_diameter_m", c.scenario.beacon.core_diameter_m},
                         {"permeability_rel", c.scenario.beacon.permeability_rel},
                         {"coils", coils}};
    doc["sensor"] = json{{"fs_hz", c.scenario.sensor.fs_hz},
                         {"resolution_gauss", c.scenario.sensor.resolution_gauss},
                         {"full_scale_gauss", c.scenario.sensor.full_scale_gauss},
                         {"noise_std_gauss", c.scenario.sensor.noise_std_gauss},
                         {"noise", c.scenario.sensor.noise},
                         {"quantization", c.scenario.sensor.quantization},
                         {"clamping", c.scenario.sensor.clamping}};
    doc["geomag_gauss"] = vec3_to(c.scenario.geomag_gauss);
    json pipeline{{"bp_low_hz", c.pipeline.bp_low_hz},
                  {"bp_high_hz", c.pipeline.bp_high_hz},
                  {"bp_order", c.pipeline.bp_order},
                  {"lpf_cut_hz", c.pipeline.lpf_cut_hz},
                  {"lpf_order", c.pipeline.lpf_order},
                  {"settle_s", c.pipeline.settle_s},
                  {"gate_gauss", c.pipeline.solver.gate_gauss},
                  {"crossing", json{{"circ_std_max_rad", c.pipeline.crossing.circ_std_max_rad},
                                    {"rate_max_rad_per_s", c.pipeline.crossing.rate_max_rad_per_s},
                                    {"window", c.pipeline.crossing.window}}},
                  {"solver", json{{"max_range_m", c.pipeline.solver.max_range_m},
                                  {"penalty_ramp_m", c.pipeline.solver.penalty_ramp_m},
                                  {"lambda0", c.pipeline.solver.lambda0},
                                  {"lambda_factor", c.pipeline.solver.lambda_factor},
                                  {"step_tol", c.pipeline.solver.step_tol},
                                  {"cost_tol", c.pipeline.solver.cost_tol},
                                  {"max_iter", c.pipeline.solver.max_iter}}},
                  {"refine", json{{"max_speed_mps", c.pipeline.refine.max_speed_mps},
                                  {"sigma_mult", c.pipeline.refine.sigma_mult},
                                  {"min_sigma_m", c.pipeline.refine.min_sigma_m},
                                  {"sigma_warmup", c.pipeline.refine.sigma_warmup},
                                  {"window", c.pipeline.refine.window}}}};
    if (c.pipeline.reference_freqs_hz) {
        pipeline["reference_freqs_hz"] = json::array({(*c.pipeline.reference_freqs_hz)[0],
                                                      (*c.pipeline.reference_freqs_hz)[1],
                                                      (*c.pipeline.reference_freqs_hz)[2]});
    } else {
        pipeline["reference_freqs_hz"] = nullptr;
    }
    doc["pipeline"] = pipeline;
    doc["scenario"] =
        json{{"kind", kind_to(c.scenario.kind)},
             {"attitude_rad", attitude_to(c.scenario.attitude)},
             {"beacon_yaw_rad", c.scenario.beacon_yaw_rad},
             {"static", json{{"points", points},
                             {"duration_per_point_s", c.scenario.grid.duration_per_point_s},
                             {"min_solutions", c.scenario.grid.min_solutions}}},
             {"dynamic", json{{"waypoints", waypoints},
                              {"speed_mps", c.scenario.path.speed_mps},
                              {"hold_s", c.scenario.path.hold_s}}},
             {"custom", json{{"pose", vec3_to(c.scenario.custom.pose)},
                             {"duration_s", c.scenario.custom.duration_s}}}};
    doc["perturbation"] =
        json{{"misalignment", json{{"enabled", c.scenario.perturbation.misalignment_enabled},
                                   {"roll_deg", c.scenario.perturbation.misalignment.roll_rad * 180.0 / M_PI},
                                   {"pitch_deg", c.scenario.perturbation.misalignment.pitch_rad * 180.0 / M_PI},
                                   {"yaw_deg", c.scenario.perturbation.misalignment.yaw_rad * 180.0 / M_PI}}},
             {"moment_error", json{{"enabled", c.scenario.perturbation.moment_error_enabled},
                                   {"fraction", c.scenario.perturbation.moment_error_frac}}}};
    doc["output"] = json{{"emit_samples", c.output.emit_samples}, {"emit_lia", c.output.emit_lia}};
    return doc;
}

namespace {
RunConfig config_from_json_impl(const json& doc);
} // namespace

RunConfig config_from_json(const json& doc) {
    try {
        return config_from_json_impl(doc);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
}

namespace {

RunConfig config_from_json_impl(const json& doc) {
    if (!doc.is_object())
        throw ConfigError("config document must be a JSON object");
    RunConfig c = default_config();
    const json reference = config_to_json(c);
    reject_unknown_keys(doc, reference, "");

    if (doc.contains("schema") && doc.at("schema").get<std::string>() != kSchema)
        throw ConfigError("unsupported config schema '" + doc.at("schema").get<std::string>()
                          + "'; expected " + kSchema);

    if (doc.contains("seed"))
        c.scenario.seed = doc.at("seed").get<std::uint64_t>();

    if (doc.contains("beacon")) {
        const json& b = doc.at("beacon");
        if (!b.contains("coils"))
            throw ConfigError("config is missing required key 'beacon.coils'");
        const json& coils = b.at("coils");
        if (!coils.is_array() || coils.size() != 3)
            throw ConfigError("'beacon.coils' must be an array of exactly 3 coils");
        c.scenario.beacon.core_diameter_m =
            num(b, "core_diameter_m", c.scenario.beacon.core_diameter_m);
        c.scenario.beacon.permeability_rel =
            num(b, "permeability_rel", c.scenario.beacon.permeability_rel);
        for (int i = 0; i < 3; ++i) {
            CoilSpec& coil = c.scenario.beacon.coils[i];
            const json& jc = coils[i];
            coil.area_m2 = num(jc, "area_m2", coil.area_m2);
            if (jc.contains("turns"))
                coil.turns = jc.at("turns").get<int>();
            coil.current_a = num(jc, "current_a", coil.current_a);
            coil.freq_hz = num(jc, "freq_hz", coil.freq_hz);
            coil.phase_rad = num(jc, "phase_rad", coil.phase_rad);
            if (jc.contains("axis"))
                coil.axis = vec3(jc.at("axis"), "beacon.coils.axis");
        }
    }

    if (doc.contains("sensor")) {
        const json& s = doc.at("sensor");
        c.scenario.sensor.fs_hz = num(s, "fs_hz", c.scenario.sensor.fs_hz);
        c.scenario.sensor.resolution_gauss =
            num(s, "resolution_gauss", c.scenario.sensor.resolution_gauss);
        c.scenario.sensor.full_scale_gauss =
            num(s, "full_scale_gauss", c.scenario.sensor.full_scale_gauss);
        c.scenario.sensor.noise_std_gauss =
            num(s, "noise_std_gauss", c.scenario.sensor.noise_std_gauss);
        c.scenario.sensor.noise = flag(s, "noise", c.scenario.sensor.noise);
        c.scenario.sensor.quantization = flag(s, "quantization", c.scenario.sensor.quantization);
        c.scenario.sensor.clamping = flag(s, "clamping", c.scenario.sensor.clamping);
    }

    if (doc.contains("geomag_gauss"))
        c.scenario.geomag_gauss = vec3(doc.at("geomag_gauss"), "geomag_gauss");

    if (doc.contains("pipeline")) {
        const json& p = doc.at("pipeline");
        c.pipeline.bp_low_hz = num(p, "bp_low_hz", c.pipeline.bp_low_hz);
        c.pipeline.bp_high_hz = num(p, "bp_high_hz", c.pipeline.bp_high_hz);
        if (p.contains("bp_order"))
            c.pipeline.bp_order = p.at("bp_order").get<int>();
        c.pipeline.lpf_cut_hz = num(p, "lpf_cut_hz", c.pipeline.lpf_cut_hz);
        if (p.contains("lpf_order"))
            c.pipeline.lpf_order = p.at("lpf_order").get<int>();
        c.pipeline.settle_s = num(p, "settle_s", c.pipeline.settle_s);
        c.pipeline.solver.gate_gauss = num(p, "gate_gauss", c.pipeline.solver.gate_gauss);
        c.pipeline.crossing.amp_gate_gauss = c.pipeline.solver.gate_gauss;
        if (p.contains("reference_freqs_hz") && !p.at("reference_freqs_hz").is_null()) {
            const Vec3 v = vec3(p.at("reference_freqs_hz"), "pipeline.reference_freqs_hz");
            c.pipeline.reference_freqs_hz = std::array<double, 3>{v.x(), v.y(), v.z()};
        }
        if (p.contains("crossing")) {
            const json& cr = p.at("crossing");
            c.pipeline.crossing.circ_std_max_rad =
                num(cr, "circ_std_max_rad", c.pipeline.crossing.circ_std_max_rad);
            c.pipeline.crossing.rate_max_rad_per_s =
                num(cr, "rate_max_rad_per_s", c.pipeline.crossing.rate_max_rad_per_s);
            if (cr.contains("window"))
                c.pipeline.crossing.window = cr.at("window").get<std::size_t>();
        }
        if (p.contains("solver")) {
            const json& so = p.at("solver");
            c.pipeline.solver.max_range_m = num(so, "max_range_m", c.pipeline.solver.max_range_m);
            c.pipeline.solver.penalty_ramp_m =
                num(so, "penalty_ramp_m", c.pipeline.solver.penalty_ramp_m);
            c.pipeline.solver.lambda0 = num(so, "lambda0", c.pipeline.solver.lambda0);
            c.pipeline.solver.lambda_factor =
                num(so, "lambda_factor", c.pipeline.solver.lambda_factor);
            c.pipeline.solver.step_tol = num(so, "step_tol", c.pipeline.solver.step_tol);
            c.pipeline.solver.cost_tol = num(so, "cost_tol", c.pipeline.solver.cost_tol);
            if (so.contains("max_iter"))
                c.pipeline.solver.max_iter = so.at("max_iter").get<int>();
        }
        if (p.contains("refine")) {
            const json& rf = p.at("refine");
            c.pipeline.refine.max_speed_mps =
                num(rf, "max_speed_mps", c.pipeline.refine.max_speed_mps);
            c.pipeline.refine.sigma_mult = num(rf, "sigma_mult", c.pipeline.refine.sigma_mult);
            c.pipeline.refine.min_sigma_m = num(rf, "min_sigma_m", c.pipeline.refine.min_sigma_m);
            if (rf.contains("sigma_warmup"))
                c.pipeline.refine.sigma_warmup = rf.at("sigma_warmup").get<std::size_t>();
            if (rf.contains("window"))
                c.pipeline.refine.window = rf.at("window").get<std::size_t>();
        }
    }

    if (doc.contains("scenario")) {
        const json& s = doc.at("scenario");
        if (s.contains("kind"))
            c.scenario.kind = kind_from(s.at("kind").get<std::string>());
        if (s.contains("attitude_rad"))
            c.scenario.attitude = attitude_from(s.at("attitude_rad"), c.scenario.attitude);
        c.scenario.beacon_yaw_rad = num(s, "beacon_yaw_rad", c.scenario.beacon_yaw_rad);
        if (s.contains("static")) {
            const json& g = s.at("static");
            if (g.contains("points")) {
                c.scenario.grid.points.clear();
                for (const auto& p : g.at("points"))
                    c.scenario.grid.points.push_back(vec3(p, "scenario.static.points"));
            }
            c.scenario.grid.duration_per_point_s =
                num(g, "duration_per_point_s", c.scenario.grid.duration_per_point_s);
            if (g.contains("min_solutions"))
                c.scenario.grid.min_solutions = g.at("min_solutions").get<std::size_t>();
        }
        if (s.contains("dynamic")) {
            const json& d = s.at("dynamic");
            if (d.contains("waypoints")) {
                c.scenario.path.waypoints.clear();
                for (const auto& p : d.at("waypoints"))
                    c.scenario.path.waypoints.push_back(vec3(p, "scenario.dynamic.waypoints"));
            }
            c.scenario.path.speed_mps = num(d, "speed_mps", c.scenario.path.speed_mps);
            c.scenario.path.hold_s = num(d, "hold_s", c.scenario.path.hold_s);
        }
        if (s.contains("custom")) {
            const json& u = s.at("custom");
            if (u.contains("pose"))
                c.scenario.custom.pose = vec3(u.at("pose"), "scenario.custom.pose");
            c.scenario.custom.duration_s = num(u, "duration_s", c.scenario.custom.duration_s);
        }
    }

    if (doc.contains("perturbation")) {
        const json& p = doc.at("perturbation");
        if (p.contains("misalignment")) {
            const json& m = p.at("misalignment");
            auto& pert = c.scenario.perturbation;
            pert.misalignment_enabled = flag(m, "enabled", pert.misalignment_enabled);
            pert.misalignment.roll_rad =
                num(m, "roll_deg", pert.misalignment.roll_rad * 180.0 / M_PI) * M_PI / 180.0;
            pert.misalignment.pitch_rad =
                num(m, "pitch_deg", pert.misalignment.pitch_rad * 180.0 / M_PI) * M_PI / 180.0;
            pert.misalignment.yaw_rad =
                num(m, "yaw_deg", pert.misalignment.yaw_rad * 180.0 / M_PI) * M_PI / 180.0;
        }
        if (p.contains("moment_error")) {
            const json& m = p.at("moment_error");
            c.scenario.perturbation.moment_error_enabled =
                flag(m, "enabled", c.scenario.perturbation.moment_error_enabled);
            c.scenario.perturbation.moment_error_frac =
                num(m, "fraction", c.scenario.perturbation.moment_error_frac);
        }
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        c.output.emit_samples = flag(o, "emit_samples", c.output.emit_samples);
        c.output.emit_lia = flag(o, "emit_lia", c.output.emit_lia);
    }

    c.scenario.validate();
    return c;
}

} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(doc);
}

void apply_override(nlohmann::json& doc, const std::string& key_equals_value) {
    const auto eq = key_equals_value.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key.path=value: '" + key_equals_value + "'");
    const std::string path = key_equals_value.substr(0, eq);
    const std::string value = key_equals_value.substr(eq + 1);

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value; // plain string
    }

    json* node = &doc;
    std::size_t begin = 0;
    while (true) {
        const auto dot = path.find('.', begin);
        const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
        if (key.empty())
            throw ConfigError("override has an empty path segment: '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = parsed;
            return;
        }
        node = &(*node)[key];
        begin = dot + 1;
    }
}

} // namespace emloc
