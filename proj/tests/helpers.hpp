#pragma once

// Test-only oracles, independent of the library code paths they check.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "emloc/field.hpp"
#include "emloc/filter.hpp"
#include "emloc/geometry.hpp"

namespace oracle {

// Plain 3x3 product, no Eigen.
using M3 = std::array<std::array<double, 3>, 3>;

inline M3 mat_mul(const M3& a, const M3& b) {
    M3 c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline M3 rx(double a) {
    return M3{{{1, 0, 0}, {0, std::cos(a), -std::sin(a)}, {0, std::sin(a), std::cos(a)}}};
}
inline M3 ry(double a) {
    return M3{{{std::cos(a), 0, std::sin(a)}, {0, 1, 0}, {-std::sin(a), 0, std::cos(a)}}};
}
inline M3 rz(double a) {
    return M3{{{std::cos(a), -std::sin(a), 0}, {std::sin(a), std::cos(a), 0}, {0, 0, 1}}};
}

// On-axis dipole field magnitude in Gauss: 2 * (mu0/4pi) * M / d^3, SI then x1e4.
inline double on_axis_field_gauss(double peak_moment, double distance_m) {
    return 2.0 * 1e-7 * peak_moment / (distance_m * distance_m * distance_m) * 1e4;
}

// |H(e^{j 2 pi f / fs})| evaluated directly from the section coefficients.
inline double cascade_gain(const emloc::BiquadCascade& c, double f_hz) {
    const std::complex<double> zi = std::polar(1.0, -2.0 * M_PI * f_hz / c.fs_hz());
    std::complex<double> h = 1.0;
    for (const auto& s : c.sections())
        h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
    return std::abs(h);
}

// (1/pi) * integral_0^pi |H|^2 dtheta by Simpson's rule; Parseval pair of the
// impulse-response energy.
inline double energy_from_response(const emloc::BiquadCascade& c, int n = 20001) {
    const double fs = c.fs_hz();
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double theta = M_PI * k / (n - 1);
        const double g = cascade_gain(c, theta * fs / (2.0 * M_PI));
        const double w = (k == 0 || k == n - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += w * g * g;
    }
    return acc * (M_PI / (n - 1)) / 3.0 / M_PI;
}

inline double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

// Uniform random position with norm in [lo, hi], components kept off the coil planes.
inline emloc::Vec3 random_position(std::mt19937& rng, double lo, double hi,
                                   double min_component_frac = 0.05) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ur(lo, hi);
    while (true) {
        emloc::Vec3 dir(u(rng), u(rng), u(rng));
        const double n = dir.norm();
        if (n < 1e-3 || n > 1.0)
            continue;
        dir /= n;
        bool ok = true;
        for (int i = 0; i < 3; ++i)
            ok = ok && std::abs(dir[i]) > min_component_frac;
        if (!ok)
            continue;
        return dir * ur(rng);
    }
}

} // namespace oracle
