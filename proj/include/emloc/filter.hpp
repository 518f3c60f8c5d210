#pragma once

#include <complex>
#include <vector>

namespace emloc {

struct FilterSpec {
    enum class Kind { low_pass, band_pass };
    Kind kind = Kind::low_pass;
    int order = 4;       // total pole count
    double f_cut_hz = 0; // low-pass corner
    double f_low_hz = 0; // band-pass corners
    double f_high_hz = 0;
    double fs_hz = 0;
};

struct Biquad {
    double b0 = 1, b1 = 0, b2 = 0;
    double a1 = 0, a2 = 0; // denominator, a0 normalized to 1
    double s1 = 0, s2 = 0; // transposed direct form II state

    double step(double x) {
        const double y = b0 * x + s1;
        s1 = b1 * x - a1 * y + s2;
        s2 = b2 * x - a2 * y;
        return y;
    }

    void reset() { s1 = s2 = 0; }
};

/// Cascade of second-order sections advanced one sample at a time.
class BiquadCascade {
public:
    BiquadCascade() = default;
    explicit BiquadCascade(std::vector<Biquad> sections, double fs_hz);

    double step(double x) {
        double y = x;
        for (auto& s : sections_)
            y = s.step(y);
        return y;
    }

    void reset();

    /// H(e^{j 2 pi f / fs}) of the whole cascade.
    std::complex<double> response(double freq_hz) const;

    const std::vector<Biquad>& sections() const { return sections_; }
    double fs_hz() const { return fs_; }

private:
    std::vector<Biquad> sections_;
    double fs_ = 0;
};

/// Butterworth design, bilinear transform with corner pre-warping, cascaded biquads.
/// Band-pass cascades are normalized to unit gain at the geometric center frequency.
/// Throws ConfigError when corners are out of (0, fs/2).
BiquadCascade design_filter(const FilterSpec& spec);

} // namespace emloc
