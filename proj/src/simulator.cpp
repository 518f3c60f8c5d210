#include "emloc/simulator.hpp"

#include <chrono>
#include <cmath>

#include "emloc/errors.hpp"

namespace emloc {

void SensorSpec::validate(double max_beacon_freq_hz) const {
    if (!(resolution_gauss > 0.0))
        throw ConfigError("sensor resolution_gauss must be > 0");
    if (!(fs_hz > 2.0 * max_beacon_freq_hz))
        throw ConfigError("sensor fs_hz must exceed twice the highest beacon frequency");
    if (!(full_scale_gauss > 0.0))
        throw ConfigError("sensor full_scale_gauss must be > 0");
    if (noise_std_gauss < 0.0)
        throw ConfigError("sensor noise_std_gauss must be >= 0");
}

void Scenario::validate() const {
    beacon.validate();
    double max_freq = 0.0;
    for (const auto& c : beacon.coils)
        max_freq = std::max(max_freq, c.freq_hz);
    sensor.validate(max_freq);
    if (perturbation.moment_error_frac < 0.0)
        throw ConfigError("perturbation moment_error_frac must be >= 0");
    switch (kind) {
    case Kind::static_grid:
        if (grid.points.empty())
            throw ConfigError("static scenario needs at least one grid point");
        if (!(grid.duration_per_point_s > 0.0))
            throw ConfigError("static scenario duration_per_point_s must be > 0");
        break;
    case Kind::dynamic_path:
        if (path.waypoints.size() < 2)
            throw ConfigError("dynamic scenario needs at least two waypoints");
        if (!(path.speed_mps > 0.0))
            throw ConfigError("dynamic scenario speed_mps must be > 0");
        if (path.hold_s < 0.0)
            throw ConfigError("dynamic scenario hold_s must be >= 0");
        break;
    case Kind::custom:
        if (!(custom.duration_s > 0.0))
            throw ConfigError("custom scenario duration_s must be > 0");
        break;
    }
}

std::vector<Vec3> default_static_grid() {
    std::vector<Vec3> pts;
    for (double x : {0.05, 0.15, 0.25, 0.35})
        for (double y : {0.1, 0.2, 0.3, 0.4})
            pts.emplace_back(x, y, 0.25);
    return pts;
}

std::vector<Vec3> default_dynamic_waypoints() {
    return {Vec3(0.45, 0.25, 0.30), Vec3(0.15, 0.10, 0.20), Vec3(0.45, 0.10, 0.25)};
}

double NoiseSource::gauss(double std_dev) {
    if (std_dev <= 0.0)
        return 0.0;
    if (have_spare_) {
        have_spare_ = false;
        return spare_ * std_dev;
    }
    // Box-Muller on uniforms in (0, 1]
    const double inv = 1.0 / (static_cast<double>(std::mt19937_64::max()) + 1.0);
    double u1 = 0.0;
    do {
        u1 = (static_cast<double>(rng_()) + 1.0) * inv;
    } while (u1 <= 0.0);
    const double u2 = static_cast<double>(rng_()) * inv;
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2) * std_dev;
}

Vec3 NoiseSource::gauss3(double std_dev) {
    return Vec3(gauss(std_dev), gauss(std_dev), gauss(std_dev));
}

SampleGenerator::SampleGenerator(const Scenario& scenario, std::uint64_t seed)
    : scenario_(scenario), noise_(seed) {
    if (scenario_.perturbation.misalignment_enabled)
        misalignment_ = compose_attitude(scenario_.perturbation.misalignment);
    if (scenario_.kind == Scenario::Kind::dynamic_path) {
        double t = scenario_.path.hold_s;
        leg_start_times_.push_back(t);
        for (std::size_t i = 0; i + 1 < scenario_.path.waypoints.size(); ++i) {
            const double len = (scenario_.path.waypoints[i + 1] - scenario_.path.waypoints[i]).norm();
            t += len / scenario_.path.speed_mps;
            leg_start_times_.push_back(t);
        }
    }
}

void SampleGenerator::hold_at(const Vec3& pose) {
    held_ = true;
    held_pose_ = pose;
}

Vec3 SampleGenerator::pose_at(double t) const {
    if (held_)
        return held_pose_;
    switch (scenario_.kind) {
    case Scenario::Kind::custom:
        return scenario_.custom.pose;
    case Scenario::Kind::static_grid:
        return scenario_.grid.points.front();
    case Scenario::Kind::dynamic_path: {
        const auto& wp = scenario_.path.waypoints;
        if (t <= leg_start_times_.front())
            return wp.front();
        for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
            const double t0 = leg_start_times_[i];
            const double t1 = leg_start_times_[i + 1];
            if (t < t1) {
                const double frac = (t - t0) / (t1 - t0);
                return wp[i] + frac * (wp[i + 1] - wp[i]);
            }
        }
        return wp.back();
    }
    }
    return Vec3::Zero();
}

SimSample SampleGenerator::at(std::size_t index) {
    const double t = static_cast<double>(index) / scenario_.sensor.fs_hz;
    const Vec3 pose = pose_at(t); // handshake-frame truth
    const Mat3 r_beacon = rot_z(scenario_.beacon_yaw_rad);
    const Vec3 pose_beacon = r_beacon.transpose() * pose;

    Vec3 field = Vec3::Zero();
    for (const auto& coil : scenario_.beacon.coils)
        field += dipole_field(coil, pose_beacon, t, scenario_.beacon.permeability_rel,
                              scenario_.beacon.core_diameter_m);
    field = r_beacon * field;

    Vec3 v = field + scenario_.geomag_gauss;
    if (scenario_.sensor.noise)
        v += noise_.gauss3(scenario_.sensor.noise_std_gauss);
    v = compose_attitude(scenario_.attitude) * v;
    if (scenario_.perturbation.misalignment_enabled)
        v = misalignment_ * v;

    if (scenario_.sensor.quantization) {
        // saturate on the code grid so clamped outputs stay on resolution multiples
        const double q = scenario_.sensor.resolution_gauss;
        const double code_max = std::floor(scenario_.sensor.full_scale_gauss / q);
        for (int a = 0; a < 3; ++a) {
            double code = std::round(v[a] / q);
            if (scenario_.sensor.clamping)
                code = std::min(std::max(code, -code_max), code_max);
            v[a] = code * q;
        }
    } else if (scenario_.sensor.clamping) {
        const double fsg = scenario_.sensor.full_scale_gauss;
        v = v.cwiseMax(-fsg).cwiseMin(fsg);
    }

    SimSample s;
    s.mag = MagSample{t, v};
    s.nav = scenario_.attitude;
    s.truth_r = pose_beacon;
    s.truth_yaw = scenario_.beacon_yaw_rad;
    return s;
}

BeaconSpec solver_model(const Scenario& scenario) {
    BeaconSpec model = scenario.beacon;
    if (scenario.perturbation.moment_error_enabled) {
        for (auto& coil : model.coils)
            coil.current_a *= 1.0 + scenario.perturbation.moment_error_frac;
    }
    return model;
}

namespace {

std::uint64_t point_seed(std::uint64_t base, std::size_t index) {
    return base + 1000003ull * static_cast<std::uint64_t>(index);
}

struct StreamOutput {
    std::vector<PoseEstimate> estimates;
    std::vector<Vec3> truth;
    std::vector<double> truth_yaw;
};

StreamOutput stream_through(SampleGenerator& gen, Pipeline& pipe, std::size_t n_samples) {
    StreamOutput out;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const SimSample s = gen.at(k);
        if (auto est = pipe.process(s.mag, s.nav)) {
            out.estimates.push_back(*est);
            out.truth.push_back(s.truth_r);
            out.truth_yaw.push_back(s.truth_yaw);
        }
    }
    return out;
}

} // namespace

ScenarioResult run_static_scenario(const Scenario& scenario, const PipelineOptions& opt) {
    Scenario sc = scenario;
    if (sc.grid.points.empty())
        sc.grid.points = default_static_grid();
    sc.validate();
    if (sc.kind != Scenario::Kind::static_grid)
        throw ConfigError("run_static_scenario needs a static-grid scenario");

    const auto start = std::chrono::steady_clock::now();
    const BeaconSpec model = solver_model(sc);
    const auto n_samples = static_cast<std::size_t>(
        std::llround(sc.grid.duration_per_point_s * sc.sensor.fs_hz));

    ScenarioResult result;
    double sq_sum = 0.0;
    std::size_t sq_count = 0;
    for (std::size_t p = 0; p < sc.grid.points.size(); ++p) {
        const Vec3& point = sc.grid.points[p];
        SampleGenerator gen(sc, point_seed(sc.seed, p));
        gen.hold_at(point);

        Pipeline pipe(model, sc.sensor.fs_hz, opt);
        pipe.handshake(handshake_init(point, sc.attitude, sc.beacon_yaw_rad,
                                      opt.solver.max_range_m, sc.beacon.core_diameter_m));

        StreamOutput out = stream_through(gen, pipe, n_samples);
        if (out.estimates.size() < sc.grid.min_solutions)
            throw InsufficientEstimatesError(
                "grid point " + std::to_string(p) + " produced "
                + std::to_string(out.estimates.size()) + " estimates; need "
                + std::to_string(sc.grid.min_solutions));

        double point_sq = 0.0;
        const Vec3 truth_beacon = rot_z(sc.beacon_yaw_rad).transpose() * point;
        for (std::size_t k = 0; k < sc.grid.min_solutions; ++k)
            point_sq += (out.estimates[k].r - truth_beacon).squaredNorm();
        sq_sum += point_sq;
        sq_count += sc.grid.min_solutions;
        result.per_point.push_back(
            {point, std::sqrt(point_sq / static_cast<double>(sc.grid.min_solutions)),
             sc.grid.min_solutions});

        result.estimates.insert(result.estimates.end(), out.estimates.begin(), out.estimates.end());
        result.truth.insert(result.truth.end(), out.truth.begin(), out.truth.end());
        result.truth_yaw.insert(result.truth_yaw.end(), out.truth_yaw.begin(), out.truth_yaw.end());

        const auto& st = pipe.stats();
        result.stats.samples += st.samples;
        result.stats.pre_settle += st.pre_settle;
        result.stats.gated += st.gated;
        result.stats.solved += st.solved;
        result.stats.no_convergence += st.no_convergence;
        result.stats.outlier_rejected += st.outlier_rejected;
        result.stats.accepted += st.accepted;
    }
    result.aggregate_rmse_m = std::sqrt(sq_sum / static_cast<double>(sq_count));
    result.motion_rmse_m = result.aggregate_rmse_m;
    result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

namespace {

ScenarioResult run_single_stream(const Scenario& sc, const PipelineOptions& opt,
                                 const Vec3& start_pose, std::size_t n_samples,
                                 double motion_from_s) {
    const auto start = std::chrono::steady_clock::now();
    const BeaconSpec model = solver_model(sc);

    SampleGenerator gen(sc, sc.seed);
    Pipeline pipe(model, sc.sensor.fs_hz, opt);
    pipe.handshake(handshake_init(start_pose, sc.attitude, sc.beacon_yaw_rad,
                                  opt.solver.max_range_m, sc.beacon.core_diameter_m));

    StreamOutput out = stream_through(gen, pipe, n_samples);
    if (out.estimates.empty())
        throw InsufficientEstimatesError("scenario produced no accepted estimates");

    ScenarioResult result;
    double sq_all = 0.0, sq_motion = 0.0;
    std::size_t n_motion = 0;
    for (std::size_t k = 0; k < out.estimates.size(); ++k) {
        const double sq = (out.estimates[k].r - out.truth[k]).squaredNorm();
        sq_all += sq;
        if (out.estimates[k].t >= motion_from_s) {
            sq_motion += sq;
            ++n_motion;
        }
    }
    result.aggregate_rmse_m = std::sqrt(sq_all / static_cast<double>(out.estimates.size()));
    result.motion_rmse_m =
        n_motion > 0 ? std::sqrt(sq_motion / static_cast<double>(n_motion)) : result.aggregate_rmse_m;
    result.estimates = std::move(out.estimates);
    result.truth = std::move(out.truth);
    result.truth_yaw = std::move(out.truth_yaw);
    result.stats = pipe.stats();
    result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace

ScenarioResult run_dynamic_scenario(const Scenario& scenario, const PipelineOptions& opt) {
    Scenario sc = scenario;
    if (sc.path.waypoints.empty())
        sc.path.waypoints = default_dynamic_waypoints();
    sc.validate();
    if (sc.kind != Scenario::Kind::dynamic_path)
        throw ConfigError("run_dynamic_scenario needs a dynamic-path scenario");

    double length = 0.0;
    for (std::size_t i = 0; i + 1 < sc.path.waypoints.size(); ++i)
        length += (sc.path.waypoints[i + 1] - sc.path.waypoints[i]).norm();
    const double total_s = sc.path.hold_s + length / sc.path.speed_mps;
    const auto n_samples = static_cast<std::size_t>(std::llround(total_s * sc.sensor.fs_hz));

    return run_single_stream(sc, opt, sc.path.waypoints.front(), n_samples, sc.path.hold_s);
}

ScenarioResult run_custom_scenario(const Scenario& scenario, const PipelineOptions& opt) {
    Scenario sc = scenario;
    sc.validate();
    if (sc.kind != Scenario::Kind::custom)
        throw ConfigError("run_custom_scenario needs a custom scenario");
    const auto n_samples =
        static_cast<std::size_t>(std::llround(sc.custom.duration_s * sc.sensor.fs_hz));
    return run_single_stream(sc, opt, sc.custom.pose, n_samples, 0.0);
}

} // namespace emloc
