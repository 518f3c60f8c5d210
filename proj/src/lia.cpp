#include "emloc/lia.hpp"

#include <cmath>

#include "emloc/errors.hpp"

namespace emloc {

double LiaOutput::max_amp() const {
    double m = 0.0;
    for (const auto& a : amp)
        m = std::max(m, a.maxCoeff());
    return m;
}

namespace {
BiquadCascade make_lpf(double cut_hz, double fs_hz, int order) {
    FilterSpec spec;
    spec.kind = FilterSpec::Kind::low_pass;
    spec.order = order;
    spec.f_cut_hz = cut_hz;
    spec.fs_hz = fs_hz;
    return design_filter(spec);
}
} // namespace

LiaChannel::LiaChannel(double ref_freq_hz, double fs_hz, double lpf_cut_hz, int lpf_order)
    : ref_freq_hz_(ref_freq_hz), omega_(2.0 * M_PI * ref_freq_hz) {
    if (!(ref_freq_hz > 0.0 && ref_freq_hz < fs_hz / 2.0))
        throw ConfigError("lock-in reference frequency must lie in (0, fs/2)");
    for (int a = 0; a < 3; ++a) {
        in_phase_lpf_[a] = make_lpf(lpf_cut_hz, fs_hz, lpf_order);
        quadrature_lpf_[a] = make_lpf(lpf_cut_hz, fs_hz, lpf_order);
    }
}

LiaChannel::CoilOutput LiaChannel::step(const Vec3& sample, double t) {
    const double ref_sin = 2.0 * std::sin(omega_ * t);
    const double ref_cos = 2.0 * std::cos(omega_ * t);
    CoilOutput out;
    for (int a = 0; a < 3; ++a) {
        const double i = in_phase_lpf_[a].step(sample[a] * ref_sin);
        const double q = quadrature_lpf_[a].step(sample[a] * ref_cos);
        out.amp[a] = std::hypot(i, q);
        out.phase[a] = wrap_angle(std::atan2(q, i));
    }
    return out;
}

void LiaChannel::reset() {
    for (int a = 0; a < 3; ++a) {
        in_phase_lpf_[a].reset();
        quadrature_lpf_[a].reset();
    }
}

LiaBank::LiaBank(const std::array<double, 3>& ref_freqs_hz, double fs_hz, double lpf_cut_hz,
                 int lpf_order)
    : ref_freqs_(ref_freqs_hz),
      channels_{LiaChannel(ref_freqs_hz[0], fs_hz, lpf_cut_hz, lpf_order),
                LiaChannel(ref_freqs_hz[1], fs_hz, lpf_cut_hz, lpf_order),
                LiaChannel(ref_freqs_hz[2], fs_hz, lpf_cut_hz, lpf_order)} {}

LiaOutput LiaBank::step(const Vec3& sample, double t) {
    LiaOutput out;
    out.t = t;
    for (int i = 0; i < 3; ++i) {
        const auto coil = channels_[i].step(sample, t);
        out.amp[i] = coil.amp;
        out.phase[i] = coil.phase;
    }
    return out;
}

void LiaBank::reset() {
    for (auto& c : channels_)
        c.reset();
}

} // namespace emloc
