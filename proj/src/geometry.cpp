#include "emloc/geometry.hpp"

#include <cmath>

namespace emloc {

Mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 m;
    m << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return m;
}

Mat3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 m;
    m << c, 0, s,
         0, 1, 0,
        -s, 0, c;
    return m;
}

Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 m;
    m << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return m;
}

Mat3 compose_attitude(const Attitude& att) {
    return rot_z(att.yaw_rad) * rot_y(att.pitch_rad) * rot_x(att.roll_rad);
}

Attitude attitude_delta(const Attitude& current, const Attitude& reference) {
    return Attitude{current.roll_rad - reference.roll_rad,
                    current.pitch_rad - reference.pitch_rad,
                    current.yaw_rad - reference.yaw_rad};
}

double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * M_PI); // [-pi, pi]
    if (w <= -M_PI)
        w += 2.0 * M_PI;
    return w;
}

} // namespace emloc
