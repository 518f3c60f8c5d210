#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "emloc/field.hpp"
#include "emloc/pipeline.hpp"

namespace emloc {

struct SensorSpec {
    double fs_hz = 200.0;
    double resolution_gauss = 1.5e-3;
    double full_scale_gauss = 2.5;
    double noise_std_gauss = 2e-3;
    bool noise = true;
    bool quantization = true;
    bool clamping = true;

    void validate(double max_beacon_freq_hz) const;
};

struct Perturbation {
    bool misalignment_enabled = false;
    Attitude misalignment{5.0 * M_PI / 180.0, 5.0 * M_PI / 180.0, 5.0 * M_PI / 180.0};
    bool moment_error_enabled = false;
    double moment_error_frac = 0.10;
};

struct GridSpec {
    std::vector<Vec3> points;             // defaults to the stock 16-point grid
    double duration_per_point_s = 10.0;
    std::size_t min_solutions = 600;      // per-point RMSE sample count
};

struct PathSpec {
    std::vector<Vec3> waypoints;
    double speed_mps = 0.1;
    double hold_s = 6.5; // dwell at the first waypoint before moving
};

struct CustomSpec {
    Vec3 pose = Vec3(0.25, 0.2, 0.3);
    double duration_s = 20.0;
};

struct Scenario {
    enum class Kind { static_grid, dynamic_path, custom };
    Kind kind = Kind::static_grid;
    GridSpec grid;
    PathSpec path;
    CustomSpec custom;
    std::uint64_t seed = 12345;
    BeaconSpec beacon = default_beacon();
    SensorSpec sensor;
    Perturbation perturbation;
    Vec3 geomag_gauss = Vec3(0.2, 0.13, 0.35);
    Attitude attitude;          // sensor attitude, constant over the run
    double beacon_yaw_rad = 0.0;

    void validate() const;
};

/// 4x4 grid in the z = 0.25 m plane, x in {0.05..0.35}, y in {0.1..0.4}, 10 cm spacing.
/// Every point keeps at least one field component above the 0.03 Gauss activation gate.
std::vector<Vec3> default_static_grid();

/// Two-segment approach inside the activation range, all within one octant.
std::vector<Vec3> default_dynamic_waypoints();

/// Deterministic Gaussian noise stream (explicit Box-Muller over mt19937_64, so the
/// byte stream does not depend on the standard library's normal_distribution).
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : rng_(seed) {}

    double gauss(double std_dev);
    Vec3 gauss3(double std_dev);

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct SimSample {
    MagSample mag;      // what the magnetometer reports
    Attitude nav;       // navigation attitude at the sample
    Vec3 truth_r;       // exact sensor position, beacon frame
    double truth_yaw;   // exact beacon yaw
};

/// Synthesizes the magnetometer stream for one scenario leg: true pose to field model,
/// noise, optional misalignment, clamping to full scale and quantization to resolution.
/// Ground truth stays exact. Deterministic for a fixed seed.
class SampleGenerator {
public:
    SampleGenerator(const Scenario& scenario, std::uint64_t seed);

    /// Pose at time t for the scenario kind (static pose set via `hold_at`).
    Vec3 pose_at(double t) const;

    /// Pin the generator to one fixed pose (static-grid points).
    void hold_at(const Vec3& pose);

    SimSample at(std::size_t index);
    double fs_hz() const { return scenario_.sensor.fs_hz; }

private:
    Scenario scenario_;
    NoiseSource noise_;
    Mat3 misalignment_ = Mat3::Identity();
    bool held_ = false;
    Vec3 held_pose_ = Vec3::Zero();
    std::vector<double> leg_start_times_; // cumulative path timing
};

struct PointResult {
    Vec3 point;
    double rmse_m = 0.0;
    std::size_t solutions = 0;
};

struct ScenarioResult {
    double aggregate_rmse_m = 0.0;
    double motion_rmse_m = 0.0; // dynamic runs: traversal phase only
    std::vector<PointResult> per_point;
    std::vector<PoseEstimate> estimates;
    std::vector<Vec3> truth;      // aligned with estimates
    std::vector<double> truth_yaw;
    PipelineStats stats;
    double runtime_s = 0.0;
};

/// Beacon model handed to the pipeline: the true beacon with the configured moment
/// error applied when enabled.
BeaconSpec solver_model(const Scenario& scenario);

/// Fresh handshake per grid point, at least `min_solutions` accepted estimates each,
/// per-point and aggregate RMSE over the first `min_solutions` of them.
/// Throws InsufficientEstimatesError when gating starves a point.
ScenarioResult run_static_scenario(const Scenario& scenario, const PipelineOptions& opt = {});

/// Handshake at the path start, dwell, then constant-speed traversal; smoothed
/// estimates compared against the exact pose at the same timestamps.
ScenarioResult run_dynamic_scenario(const Scenario& scenario, const PipelineOptions& opt = {});

/// Single static pose streamed for the configured duration.
ScenarioResult run_custom_scenario(const Scenario& scenario, const PipelineOptions& opt = {});

} // namespace emloc
