#include "emloc/field.hpp"

#include <cmath>

#include "emloc/errors.hpp"

namespace emloc {

namespace {
constexpr double kTeslaToGauss = 1e4;
constexpr double kMuOver4Pi = 1e-7; // mu0 / (4*pi), SI
} // namespace

void CoilSpec::validate() const {
    if (!(area_m2 > 0.0))
        throw ConfigError("coil area_m2 must be > 0");
    if (turns < 1)
        throw ConfigError("coil turns must be >= 1");
    if (!(current_a > 0.0))
        throw ConfigError("coil current_a must be > 0");
    if (!(freq_hz > 0.0))
        throw ConfigError("coil freq_hz must be > 0");
    if (std::abs(axis.norm() - 1.0) > 1e-9)
        throw ConfigError("coil axis must be a unit vector");
}

void BeaconSpec::validate() const {
    for (const auto& c : coils)
        c.validate();
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            if (std::abs(coils[i].axis.dot(coils[j].axis)) > 1e-6)
                throw ConfigError("beacon coil axes must be pairwise orthogonal");
            if (coils[i].freq_hz == coils[j].freq_hz)
                throw ConfigError("beacon coil frequencies must be pairwise distinct");
        }
    }
    if (!(core_diameter_m > 0.0))
        throw ConfigError("beacon core_diameter_m must be > 0");
    if (!(permeability_rel > 0.0))
        throw ConfigError("beacon permeability_rel must be > 0");
}

Vec3 magnetic_moment(const CoilSpec& coil, double t) {
    const double w = 2.0 * M_PI * coil.freq_hz;
    return coil.peak_moment() * std::sin(w * t + coil.phase_rad) * coil.axis;
}

Vec3 dipole_field_of_moment(const Vec3& m, const Vec3& r, double mu_r, double min_range_m) {
    const double d = r.norm();
    if (d <= min_range_m)
        throw DomainError("dipole model invalid at range " + std::to_string(d) + " m");
    const double d2 = d * d;
    const double d5 = d2 * d2 * d;
    const Vec3 b_tesla = kMuOver4Pi * mu_r * (3.0 * m.dot(r) * r - m * d2) / d5;
    return b_tesla * kTeslaToGauss;
}

Vec3 dipole_field(const CoilSpec& coil, const Vec3& r, double t, double mu_r, double min_range_m) {
    return dipole_field_of_moment(magnetic_moment(coil, t), r, mu_r, min_range_m);
}

Vec3 dipole_peak_field(const CoilSpec& coil, const Vec3& r, double mu_r, double min_range_m) {
    return dipole_field_of_moment(coil.peak_moment() * coil.axis, r, mu_r, min_range_m);
}

Mat3 dipole_peak_gradient(const CoilSpec& coil, const Vec3& r, double mu_r, double min_range_m) {
    const double d = r.norm();
    if (d <= min_range_m)
        throw DomainError("dipole model invalid at range " + std::to_string(d) + " m");
    const Vec3 m = coil.peak_moment() * coil.axis;
    const double d2 = d * d;
    const double d5 = d2 * d2 * d;
    const double d7 = d5 * d2;
    const double u = m.dot(r);
    const Vec3 num = 3.0 * u * r - m * d2;
    Mat3 g = (3.0 * r * m.transpose() + 3.0 * u * Mat3::Identity() - 2.0 * m * r.transpose()) / d5
             - 5.0 * num * r.transpose() / d7;
    return kMuOver4Pi * mu_r * kTeslaToGauss * g;
}

MagSample measured_field(const BeaconSpec& beacon, const Attitude& sensor_attitude, const Vec3& r,
                         const Vec3& geomag_gauss, double t, const Vec3* noise_gauss) {
    Vec3 sum = Vec3::Zero();
    for (const auto& coil : beacon.coils)
        sum += dipole_field(coil, r, t, beacon.permeability_rel, beacon.core_diameter_m);
    sum += geomag_gauss;
    if (noise_gauss)
        sum += *noise_gauss;
    return MagSample{t, compose_attitude(sensor_attitude) * sum};
}

BeaconSpec default_beacon() {
    const double area = M_PI * 0.06 * 0.06;
    BeaconSpec b;
    b.coils[0] = CoilSpec{area, 370, 1.53, 16.0, 0.0, Vec3::UnitZ()};
    b.coils[1] = CoilSpec{area, 370, 1.30, 20.0, 0.0, Vec3::UnitX()};
    b.coils[2] = CoilSpec{area, 370, 1.40, 25.0, 0.0, Vec3::UnitY()};
    b.core_diameter_m = 0.12;
    b.permeability_rel = 1.0;
    return b;
}

} // namespace emloc
