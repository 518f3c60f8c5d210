#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "emloc/field.hpp"
#include "emloc/geometry.hpp"
#include "emloc/lia.hpp"

namespace emloc {

/// Resolved signs (+1/-1) of the nine measured field components, coil-major.
struct SignState {
    std::array<Vec3, 3> signs{Vec3::Ones(), Vec3::Ones(), Vec3::Ones()};
    bool initialized = false;
};

/// Componentwise signs of the model envelope field at r0. Throws DomainError near the
/// beacon and DegenerateError when a model component is too small to carry a sign.
SignState init_signs_from_position(const Vec3& r0, const BeaconSpec& beacon);

/// Fixed-capacity ring of recent phase samples with circular statistics.
class PhaseWindow {
public:
    explicit PhaseWindow(std::size_t capacity = 200);

    void push(double phase_rad);
    void reset();

    std::size_t size() const { return count_; }
    std::size_t capacity() const { return buf_.size(); }
    bool full() const { return count_ == buf_.size(); }

    /// Direction of the mean unit phasor, (-pi, pi].
    double circular_mean() const;
    /// sqrt(-2 ln R) of the mean resultant length R.
    double circular_std() const;
    /// Mean wrapped sample-to-sample increment times fs, rad/s.
    double rate_rad_per_s(double fs_hz) const;

private:
    struct Entry {
        double sin = 0, cos = 0, diff = 0;
        bool has_diff = false;
    };
    std::vector<Entry> buf_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    std::size_t diff_count_ = 0;
    double sum_sin_ = 0, sum_cos_ = 0, sum_diff_ = 0;
    double last_phase_ = 0;
    bool has_last_ = false;
};

struct CrossingThresholds {
    double amp_gate_gauss = 0.03;
    double circ_std_max_rad = 0.5;
    double rate_max_rad_per_s = M_PI;
    std::size_t window = 200;
};

/// Tracks the component signs through 180-degree phase shifts. A component flips when
/// its phase classification (in-phase vs anti-phase, boundary at |phase| = pi/2) changes
/// and the window statistics vouch for the reading: amplitude above the gate, quiet
/// circular spread, bounded phase rate. Invalid readings are held, so a flip that
/// happens while the component is too weak to classify registers once it re-emerges.
class SignTracker {
public:
    SignTracker(const BeaconSpec& beacon, double fs_hz, CrossingThresholds thresholds = {});

    void init(const Vec3& r0);
    void update(const LiaOutput& lia);

    const SignState& state() const { return state_; }
    const std::array<std::array<int, 3>, 3>& flip_counts() const { return flips_; }

private:
    BeaconSpec beacon_;
    double fs_;
    CrossingThresholds th_;
    SignState state_;
    std::array<std::array<PhaseWindow, 3>, 3> windows_;
    std::array<std::array<bool, 3>, 3> anti_{};
    std::array<std::array<int, 3>, 3> flips_{};
};

} // namespace emloc
