#include "emloc/filter.hpp"

#include <cmath>

#include "emloc/errors.hpp"

namespace emloc {

namespace {

// Upper-half-plane Butterworth prototype poles for an even order.
std::vector<std::complex<double>> butterworth_poles(int order) {
    std::vector<std::complex<double>> poles;
    for (int k = 0; k < order / 2; ++k) {
        const double phi = M_PI * (2.0 * k + 1.0) / (2.0 * order) + M_PI / 2.0;
        poles.emplace_back(std::cos(phi), std::sin(phi));
    }
    return poles;
}

void check_stable(const Biquad& s) {
    // both poles strictly inside the unit circle
    if (!(std::abs(s.a2) < 1.0 && std::abs(s.a1) < 1.0 + s.a2))
        throw ConfigError("filter design produced an unstable section");
}

// Bilinear transform of an analog section (bs*s + b0s) / (s^2 + a1s*s + a0s).
Biquad bilinear(double b1s, double b0s, double a1s, double a0s, double fs) {
    const double k = 2.0 * fs;
    const double k2 = k * k;
    const double d = k2 + a1s * k + a0s;
    Biquad q;
    q.b0 = (b1s * k + b0s) / d;
    q.b1 = (2.0 * b0s) / d;
    q.b2 = (b0s - b1s * k) / d;
    q.a1 = (2.0 * a0s - 2.0 * k2) / d;
    q.a2 = (k2 - a1s * k + a0s) / d;
    check_stable(q);
    return q;
}

BiquadCascade design_low_pass(int order, double f_cut, double fs) {
    const double wc = 2.0 * fs * std::tan(M_PI * f_cut / fs); // pre-warped rad/s
    std::vector<Biquad> sections;
    for (const auto& p : butterworth_poles(order)) {
        // prototype section 1/((s/wc)^2 + 2*zeta*(s/wc) + 1)
        const double zeta = -p.real();
        sections.push_back(bilinear(0.0, wc * wc, 2.0 * zeta * wc, wc * wc, fs));
    }
    return BiquadCascade(std::move(sections), fs);
}

BiquadCascade design_band_pass(int order, double f_low, double f_high, double fs) {
    const double wl = 2.0 * fs * std::tan(M_PI * f_low / fs);
    const double wh = 2.0 * fs * std::tan(M_PI * f_high / fs);
    const double bw = wh - wl;
    const double w0sq = wl * wh;

    std::vector<Biquad> sections;
    for (const auto& p : butterworth_poles(order / 2)) {
        // low-pass-to-band-pass: each prototype pole p maps to the roots of
        // s^2 - p*bw*s + w0^2, giving two conjugate analog pole pairs.
        const std::complex<double> disc = std::sqrt(p * p * bw * bw - 4.0 * w0sq);
        for (const auto& s : {(p * bw + disc) * 0.5, (p * bw - disc) * 0.5}) {
            const double a1s = -2.0 * s.real();
            const double a0s = std::norm(s);
            sections.push_back(bilinear(bw, 0.0, a1s, a0s, fs));
        }
    }
    BiquadCascade cascade(std::move(sections), fs);

    // normalize passband gain at the geometric center
    const double fc = std::sqrt(f_low * f_high);
    const double g = std::abs(cascade.response(fc));
    std::vector<Biquad> scaled = cascade.sections();
    scaled.front().b0 /= g;
    scaled.front().b1 /= g;
    scaled.front().b2 /= g;
    return BiquadCascade(std::move(scaled), fs);
}

} // namespace

BiquadCascade::BiquadCascade(std::vector<Biquad> sections, double fs_hz)
    : sections_(std::move(sections)), fs_(fs_hz) {}

void BiquadCascade::reset() {
    for (auto& s : sections_)
        s.reset();
}

std::complex<double> BiquadCascade::response(double freq_hz) const {
    const std::complex<double> z = std::polar(1.0, 2.0 * M_PI * freq_hz / fs_);
    const std::complex<double> zi = 1.0 / z;
    std::complex<double> h = 1.0;
    for (const auto& s : sections_) {
        h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
    }
    return h;
}

BiquadCascade design_filter(const FilterSpec& spec) {
    if (!(spec.fs_hz > 0.0))
        throw ConfigError("filter fs_hz must be > 0");
    if (spec.order != 2 && spec.order != 4 && spec.order != 6 && spec.order != 8)
        throw ConfigError("filter order must be an even value in [2, 8]");
    const double nyquist = spec.fs_hz / 2.0;
    switch (spec.kind) {
    case FilterSpec::Kind::low_pass:
        if (!(spec.f_cut_hz > 0.0 && spec.f_cut_hz < nyquist))
            throw ConfigError("low-pass corner must lie in (0, fs/2)");
        return design_low_pass(spec.order, spec.f_cut_hz, spec.fs_hz);
    case FilterSpec::Kind::band_pass:
        if (!(spec.f_low_hz > 0.0 && spec.f_high_hz > spec.f_low_hz && spec.f_high_hz < nyquist))
            throw ConfigError("band-pass corners must satisfy 0 < f_low < f_high < fs/2");
        if (spec.order % 4 != 0)
            throw ConfigError("band-pass order must be a multiple of 4");
        return design_band_pass(spec.order, spec.f_low_hz, spec.f_high_hz, spec.fs_hz);
    }
    throw ConfigError("unknown filter kind");
}

} // namespace emloc
