#pragma once

#include <Eigen/Dense>

namespace emloc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Roll/pitch/yaw about the x/y/z axes respectively, in radians.
struct Attitude {
    double roll_rad = 0.0;
    double pitch_rad = 0.0;
    double yaw_rad = 0.0;
};

Mat3 rot_x(double angle_rad);
Mat3 rot_y(double angle_rad);
Mat3 rot_z(double angle_rad);

/// Composed body rotation R = Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 compose_attitude(const Attitude& att);

/// Componentwise difference of Euler angles (relative attitude).
Attitude attitude_delta(const Attitude& current, const Attitude& reference);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double angle_rad);

} // namespace emloc
