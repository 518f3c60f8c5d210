#pragma once

#include <string>
#include <vector>

#include "emloc/field.hpp"
#include "emloc/solver.hpp"

namespace emloc {

/// One recorded magnetometer row: sample plus the navigation attitude.
struct SampleRow {
    MagSample mag;
    Attitude nav;
};

/// Row-aligned ground truth for an estimate.
struct TruthRow {
    double t = 0.0;
    Vec3 r = Vec3::Zero();
    double beacon_yaw = 0.0;
};

struct PhaseRow {
    double t = 0.0;
    double phase_rad = 0.0;
};

// Schemas (UTF-8, LF, one header line):
//   samples:   t_s,bx_gauss,by_gauss,bz_gauss,yaw_rad,pitch_rad,roll_rad
//   estimates: t_s,x_m,y_m,z_m,beacon_yaw_rad,residual_gauss,flag
//   truth:     t_s,x_m,y_m,z_m,beacon_yaw_rad
//   points:    x_m,y_m,z_m
//   phase:     t_s,phase_rad
// Samples are written with full double round-trip precision so a replay reproduces
// the in-process run exactly; the other files carry 9 significant digits.

void write_samples_csv(const std::string& path, const std::vector<SampleRow>& rows);
std::vector<SampleRow> read_samples_csv(const std::string& path);

void write_estimates_csv(const std::string& path, const std::vector<PoseEstimate>& estimates);
std::vector<PoseEstimate> read_estimates_csv(const std::string& path);

void write_truth_csv(const std::string& path, const std::vector<TruthRow>& rows);
std::vector<TruthRow> read_truth_csv(const std::string& path);

void write_points_csv(const std::string& path, const std::vector<Vec3>& points);
std::vector<Vec3> read_points_csv(const std::string& path);

void write_phase_csv(const std::string& path, const std::vector<PhaseRow>& rows);
std::vector<PhaseRow> read_phase_csv(const std::string& path);

/// Checks that sample times are strictly increasing with spacing 1/fs within 1e-9.
/// Throws ConfigError naming the first offending row.
void validate_sample_spacing(const std::vector<SampleRow>& rows, double fs_hz);

} // namespace emloc
