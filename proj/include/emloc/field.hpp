#pragma once

#include <array>
#include <optional>

#include "emloc/geometry.hpp"

namespace emloc {

/// One transmitting coil, modeled as an oscillating magnetic dipole.
struct CoilSpec {
    double area_m2 = 0.0;   // cross-section area
    int turns = 0;
    double current_a = 0.0; // excitation amplitude
    double freq_hz = 0.0;
    double phase_rad = 0.0;
    Vec3 axis = Vec3::UnitZ(); // unit vector in the beacon frame

    /// Envelope dipole moment A*N*I in A*m^2.
    double peak_moment() const { return area_m2 * turns * current_a; }

    /// Throws ConfigError on invalid geometry or drive parameters.
    void validate() const;
};

/// Three orthogonal coils driven at distinct frequencies.
struct BeaconSpec {
    std::array<CoilSpec, 3> coils;
    double core_diameter_m = 0.12;
    double permeability_rel = 1.0;

    void validate() const;
};

/// One magnetometer reading: time since initialization and flux density in Gauss (sensor frame).
struct MagSample {
    double t = 0.0;
    Vec3 field = Vec3::Zero();
};

/// Instantaneous dipole moment A*N*I*sin(w*t + phase)*axis.
Vec3 magnetic_moment(const CoilSpec& coil, double t);

/// Flux density in Gauss of a dipole with moment `moment` (A*m^2) at offset r (m).
/// Throws DomainError when |r| <= min_range_m, where the point-dipole model does not hold.
Vec3 dipole_field_of_moment(const Vec3& moment, const Vec3& r, double mu_r, double min_range_m);

/// Instantaneous coil field at position r, Gauss.
Vec3 dipole_field(const CoilSpec& coil, const Vec3& r, double t, double mu_r = 1.0,
                  double min_range_m = 0.12);

/// Envelope (peak-moment) coil field at position r, Gauss. This is the quantity the
/// position solver fits against the demodulated amplitudes.
Vec3 dipole_peak_field(const CoilSpec& coil, const Vec3& r, double mu_r = 1.0,
                       double min_range_m = 0.12);

/// Spatial gradient dB/dr of the envelope field, Gauss per meter. Symmetric 3x3.
Mat3 dipole_peak_gradient(const CoilSpec& coil, const Vec3& r, double mu_r = 1.0,
                          double min_range_m = 0.12);

/// Full measurement model: sum of coil fields plus geomagnetic bias and optional noise,
/// rotated into the sensor frame by the sensor attitude.
MagSample measured_field(const BeaconSpec& beacon, const Attitude& sensor_attitude,
                         const Vec3& r, const Vec3& geomag_gauss, double t,
                         const Vec3* noise_gauss = nullptr);

/// Beacon with the stock coil set: 370 turns, 0.12 m core, currents 1.53/1.3/1.4 A at
/// 16/20/25 Hz. Coil axes are (z, x, y) so that the in/anti-phase sector table holds.
BeaconSpec default_beacon();

} // namespace emloc
