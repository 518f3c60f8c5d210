#pragma once

#include <array>

#include "emloc/filter.hpp"
#include "emloc/geometry.hpp"

namespace emloc {

/// Demodulated per-coil amplitude and phase of the three beacon signals.
/// amp[i] holds |B'_i| per sensor axis in Gauss, phase[i] the corresponding
/// phases wrapped to (-pi, pi]. ready is false while the output is still settling.
struct LiaOutput {
    double t = 0.0;
    std::array<Vec3, 3> amp{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    std::array<Vec3, 3> phase{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    bool ready = false;

    double max_amp() const;
};

/// Digital lock-in amplifier for one reference frequency: mixes each axis of the
/// input with 2*sin(w t) and 2*cos(w t) and low-pass filters the products, yielding
/// the in-phase and quadrature components per axis.
class LiaChannel {
public:
    LiaChannel(double ref_freq_hz, double fs_hz, double lpf_cut_hz = 0.4, int lpf_order = 4);

    struct CoilOutput {
        Vec3 amp = Vec3::Zero();
        Vec3 phase = Vec3::Zero();
    };

    CoilOutput step(const Vec3& sample, double t);
    void reset();

    double ref_freq_hz() const { return ref_freq_hz_; }

private:
    double ref_freq_hz_;
    double omega_;
    std::array<BiquadCascade, 3> in_phase_lpf_;
    std::array<BiquadCascade, 3> quadrature_lpf_;
};

/// Three lock-in channels, one per beacon coil.
class LiaBank {
public:
    LiaBank(const std::array<double, 3>& ref_freqs_hz, double fs_hz, double lpf_cut_hz = 0.4,
            int lpf_order = 4);

    LiaOutput step(const Vec3& sample, double t);
    void reset();

    const std::array<double, 3>& ref_freqs_hz() const { return ref_freqs_; }

private:
    std::array<double, 3> ref_freqs_;
    std::array<LiaChannel, 3> channels_;
};

} // namespace emloc
