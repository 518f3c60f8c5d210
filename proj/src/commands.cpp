#include "emloc/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include <json.hpp>

#include "emloc/calibration.hpp"
#include "emloc/config.hpp"
#include "emloc/csv.hpp"
#include "emloc/errors.hpp"
#include "emloc/pipeline.hpp"
#include "emloc/simulator.hpp"

namespace emloc {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitRange = 4;

RunConfig resolve_config(const CommonArgs& args) {
    json doc = args.config_path ? [&] {
        std::ifstream in(*args.config_path);
        if (!in)
            throw ConfigError("cannot open config file " + *args.config_path);
        json d;
        try {
            in >> d;
        } catch (const json::exception& e) {
            throw ConfigError("config parse error: " + std::string(e.what()));
        }
        return d;
    }() : json::object();
    for (const auto& ov : args.overrides)
        apply_override(doc, ov);
    RunConfig config = config_from_json(doc);
    if (args.seed)
        config.scenario.seed = *args.seed;
    return config;
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    out << doc.dump(2) << '\n';
}

void emit_json(const std::optional<std::string>& out_path, const json& doc) {
    if (out_path)
        write_json(*out_path, doc);
    else
        std::cout << doc.dump(2) << '\n';
}

json stats_to_json(const PipelineStats& s) {
    return json{{"samples", s.samples},
                {"pre_settle", s.pre_settle},
                {"gated", s.gated},
                {"solved", s.solved},
                {"no_convergence", s.no_convergence},
                {"outlier_rejected", s.outlier_rejected},
                {"accepted", s.accepted}};
}

struct LiaRecord {
    double t;
    LiaOutput lia;
};

void write_lia_csv(const std::string& path, const std::vector<LiaRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    out << "t_s";
    for (int i = 1; i <= 3; ++i)
        for (const char* a : {"x", "y", "z"})
            out << ",amp" << i << a << "_gauss";
    for (int i = 1; i <= 3; ++i)
        for (const char* a : {"x", "y", "z"})
            out << ",phase" << i << a << "_rad";
    out << '\n';
    char buf[40];
    const auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        out << ',' << buf;
    };
    for (const auto& rec : records) {
        std::snprintf(buf, sizeof(buf), "%.9g", rec.t);
        out << buf;
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 3; ++a)
                put(rec.lia.amp[i][a]);
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 3; ++a)
                put(rec.lia.phase[i][a]);
        out << '\n';
    }
}

std::vector<TruthRow> truth_rows(const ScenarioResult& result) {
    std::vector<TruthRow> rows;
    rows.reserve(result.estimates.size());
    for (std::size_t i = 0; i < result.estimates.size(); ++i)
        rows.push_back(TruthRow{result.estimates[i].t, result.truth[i], result.truth_yaw[i]});
    return rows;
}

std::vector<SampleRow> record_scenario_samples(const Scenario& scenario) {
    Scenario sc = scenario;
    std::size_t n = 0;
    switch (sc.kind) {
    case Scenario::Kind::dynamic_path: {
        double length = 0.0;
        for (std::size_t i = 0; i + 1 < sc.path.waypoints.size(); ++i)
            length += (sc.path.waypoints[i + 1] - sc.path.waypoints[i]).norm();
        n = static_cast<std::size_t>(
            std::llround((sc.path.hold_s + length / sc.path.speed_mps) * sc.sensor.fs_hz));
        break;
    }
    case Scenario::Kind::custom:
        n = static_cast<std::size_t>(std::llround(sc.custom.duration_s * sc.sensor.fs_hz));
        break;
    case Scenario::Kind::static_grid:
        throw ConfigError("sample recording supports dynamic-path and custom scenarios only");
    }
    SampleGenerator gen(sc, sc.seed);
    std::vector<SampleRow> rows;
    rows.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const SimSample s = gen.at(k);
        rows.push_back(SampleRow{s.mag, s.nav});
    }
    return rows;
}

json handshake_to_json(const HandshakeFrame& frame) {
    return json{{"schema", "emloc-handshake/1"},
                {"r0_m", json::array({frame.r0.x(), frame.r0.y(), frame.r0.z()})},
                {"nav_attitude_rad",
                 json{{"roll_rad", frame.nav_attitude_at_handshake.roll_rad},
                      {"pitch_rad", frame.nav_attitude_at_handshake.pitch_rad},
                      {"yaw_rad", frame.nav_attitude_at_handshake.yaw_rad}}},
                {"beacon_yaw_rad", frame.beacon_yaw_at_handshake}};
}

HandshakeFrame handshake_from_json(const std::string& path, double max_range_m,
                                   double min_range_m) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open handshake file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("handshake parse error: " + std::string(e.what()));
    }
    if (!doc.contains("r0_m") || !doc.at("r0_m").is_array() || doc.at("r0_m").size() != 3)
        throw ConfigError("handshake file needs a 3-element 'r0_m' array");
    const Vec3 r0(doc["r0_m"][0].get<double>(), doc["r0_m"][1].get<double>(),
                  doc["r0_m"][2].get<double>());
    Attitude nav;
    if (doc.contains("nav_attitude_rad")) {
        const json& a = doc.at("nav_attitude_rad");
        nav.roll_rad = a.value("roll_rad", 0.0);
        nav.pitch_rad = a.value("pitch_rad", 0.0);
        nav.yaw_rad = a.value("yaw_rad", 0.0);
    }
    const double beacon_yaw = doc.value("beacon_yaw_rad", 0.0);
    return handshake_init(r0, nav, beacon_yaw, max_range_m, min_range_m);
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRange;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ArityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InsufficientDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace

int cmd_simulate(const CommonArgs& args) {
    return run_guarded([&] {
        const RunConfig config = resolve_config(args);
        std::filesystem::create_directories(args.out_dir);
        const auto path_in_out = [&](const char* name) {
            return (std::filesystem::path(args.out_dir) / name).string();
        };

        ScenarioResult result;
        switch (config.scenario.kind) {
        case Scenario::Kind::static_grid:
            result = run_static_scenario(config.scenario, config.pipeline);
            break;
        case Scenario::Kind::dynamic_path:
            result = run_dynamic_scenario(config.scenario, config.pipeline);
            break;
        case Scenario::Kind::custom:
            result = run_custom_scenario(config.scenario, config.pipeline);
            break;
        }

        write_estimates_csv(path_in_out("estimates.csv"), result.estimates);
        write_truth_csv(path_in_out("truth.csv"), truth_rows(result));

        json res;
        res["schema"] = "emloc-result/1";
        res["scenario"] = config.scenario.kind == Scenario::Kind::static_grid ? "static-grid"
                          : config.scenario.kind == Scenario::Kind::dynamic_path ? "dynamic-path"
                                                                                 : "custom";
        res["seed"] = config.scenario.seed;
        res["aggregate_rmse_m"] = result.aggregate_rmse_m;
        res["motion_rmse_m"] = result.motion_rmse_m;
        res["estimates"] = result.estimates.size();
        res["runtime_s"] = result.runtime_s;
        res["counts"] = stats_to_json(result.stats);
        if (!result.per_point.empty()) {
            json pts = json::array();
            for (const auto& p : result.per_point) {
                pts.push_back(json{{"point", json::array({p.point.x(), p.point.y(), p.point.z()})},
                                   {"rmse_m", p.rmse_m},
                                   {"solutions", p.solutions}});
            }
            res["per_point"] = pts;
        }

        if (config.output.emit_samples && config.scenario.kind != Scenario::Kind::static_grid) {
            const auto rows = record_scenario_samples(config.scenario);
            write_samples_csv(path_in_out("samples.csv"), rows);
            HandshakeFrame frame = handshake_init(
                config.scenario.kind == Scenario::Kind::dynamic_path
                    ? config.scenario.path.waypoints.front()
                    : config.scenario.custom.pose,
                config.scenario.attitude, config.scenario.beacon_yaw_rad,
                config.pipeline.solver.max_range_m, config.scenario.beacon.core_diameter_m);
            write_json(path_in_out("handshake.json"), handshake_to_json(frame));
        }
        if (config.output.emit_lia && config.scenario.kind != Scenario::Kind::static_grid) {
            // rerun the pipeline over the same stream recording demodulated outputs
            const auto rows = record_scenario_samples(config.scenario);
            Pipeline pipe(solver_model(config.scenario), config.scenario.sensor.fs_hz,
                          config.pipeline);
            pipe.handshake(handshake_init(
                config.scenario.kind == Scenario::Kind::dynamic_path
                    ? config.scenario.path.waypoints.front()
                    : config.scenario.custom.pose,
                config.scenario.attitude, config.scenario.beacon_yaw_rad,
                config.pipeline.solver.max_range_m, config.scenario.beacon.core_diameter_m));
            std::vector<LiaRecord> records;
            records.reserve(rows.size());
            for (const auto& row : rows) {
                pipe.process(row.mag, row.nav);
                records.push_back(LiaRecord{row.mag.t, pipe.last_lia()});
            }
            write_lia_csv(path_in_out("lia.csv"), records);
        }

        write_json(path_in_out("result.json"), res);
        return kExitOk;
    });
}

int cmd_replay(const std::string& samples_csv, const std::string& handshake_json,
               const CommonArgs& args) {
    return run_guarded([&] {
        const RunConfig config = resolve_config(args);
        std::filesystem::create_directories(args.out_dir);
        const auto path_in_out = [&](const char* name) {
            return (std::filesystem::path(args.out_dir) / name).string();
        };

        const auto rows = read_samples_csv(samples_csv);
        if (rows.empty())
            throw ConfigError(samples_csv + ": no sample rows");
        validate_sample_spacing(rows, config.scenario.sensor.fs_hz);

        const HandshakeFrame frame = handshake_from_json(
            handshake_json, config.pipeline.solver.max_range_m,
            config.scenario.beacon.core_diameter_m);

        Pipeline pipe(solver_model(config.scenario), config.scenario.sensor.fs_hz,
                      config.pipeline);
        pipe.handshake(frame);

        std::vector<PoseEstimate> estimates;
        for (const auto& row : rows) {
            if (auto est = pipe.process(row.mag, row.nav))
                estimates.push_back(*est);
        }
        write_estimates_csv(path_in_out("estimates.csv"), estimates);

        json res;
        res["schema"] = "emloc-result/1";
        res["scenario"] = "replay";
        res["estimates"] = estimates.size();
        res["counts"] = stats_to_json(pipe.stats());
        res["warnings"] = json{{"gated_samples", pipe.stats().gated},
                               {"rejected_outliers", pipe.stats().outlier_rejected},
                               {"unconverged_solves", pipe.stats().no_convergence}};
        write_json(path_in_out("result.json"), res);
        return kExitOk;
    });
}

int cmd_calibrate_offset(const std::string& truth_csv, const std::string& estimates_csv,
                         const std::optional<std::string>& out_path) {
    return run_guarded([&] {
        const auto truth = read_points_csv(truth_csv);
        const auto estimates = read_points_csv(estimates_csv);
        const OffsetReport report = offset_calibration(truth, estimates);

        double before = 0, after = 0;
        for (std::size_t i = 0; i < report.points; ++i) {
            before += report.error_before_m[i];
            after += report.error_after_m[i];
        }
        json doc;
        doc["schema"] = "emloc-offset/1";
        doc["offset_m"] =
            json::array({report.offset.x(), report.offset.y(), report.offset.z()});
        doc["points"] = report.points;
        doc["mean_error_before_m"] = before / static_cast<double>(report.points);
        doc["mean_error_after_m"] = after / static_cast<double>(report.points);
        doc["error_before_m"] = report.error_before_m;
        doc["error_after_m"] = report.error_after_m;
        emit_json(out_path, doc);
        return kExitOk;
    });
}

int cmd_tune_frequency(const std::string& phase_csv, const std::optional<std::string>& out_path,
                       double stable_threshold_hz) {
    return run_guarded([&] {
        const auto rows = read_phase_csv(phase_csv);
        std::vector<double> t, phase;
        t.reserve(rows.size());
        phase.reserve(rows.size());
        for (const auto& r : rows) {
            t.push_back(r.t);
            phase.push_back(r.phase_rad);
        }
        const FrequencyOffsetReport report =
            estimate_frequency_offset(t, phase, stable_threshold_hz);
        json doc;
        doc["schema"] = "emloc-tune/1";
        doc["delta_f_hz"] = report.delta_f_hz;
        doc["slope_rad_per_s"] = report.slope_rad_per_s;
        doc["stable"] = report.stable;
        doc["samples"] = report.samples;
        doc["stable_threshold_hz"] = stable_threshold_hz;
        emit_json(out_path, doc);
        return kExitOk;
    });
}

int cmd_metrics(const std::string& estimates_csv, const std::string& truth_csv,
                const std::optional<std::string>& out_path) {
    return run_guarded([&] {
        const auto estimates = read_estimates_csv(estimates_csv);
        const auto truth = read_truth_csv(truth_csv);
        std::vector<Vec3> est_r, truth_r;
        est_r.reserve(estimates.size());
        truth_r.reserve(truth.size());
        for (const auto& e : estimates)
            est_r.push_back(e.r);
        for (const auto& r : truth)
            truth_r.push_back(r.r);
        const ErrorMetrics m = error_metrics(est_r, truth_r);

        json doc;
        doc["schema"] = "emloc-metrics/1";
        doc["count"] = m.count;
        doc["rmse_m"] = m.rmse_m;
        doc["mean_error_m"] = m.mean_m;
        doc["std_error_m"] = m.std_m;
        doc["rmse_axis_m"] = json::array({m.rmse_axis.x(), m.rmse_axis.y(), m.rmse_axis.z()});
        doc["mean_axis_m"] = json::array({m.mean_axis.x(), m.mean_axis.y(), m.mean_axis.z()});
        doc["std_axis_m"] = json::array({m.std_axis.x(), m.std_axis.y(), m.std_axis.z()});
        doc["segment_rmse_m"] = m.segment_rmse_m;
        emit_json(out_path, doc);
        return kExitOk;
    });
}

} // namespace emloc
