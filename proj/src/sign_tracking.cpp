#include "emloc/sign_tracking.hpp"

#include <cmath>

#include "emloc/errors.hpp"

namespace emloc {

SignState init_signs_from_position(const Vec3& r0, const BeaconSpec& beacon) {
    SignState state;
    for (int i = 0; i < 3; ++i) {
        const Vec3 b = dipole_peak_field(beacon.coils[i], r0, beacon.permeability_rel,
                                         beacon.core_diameter_m);
        for (int a = 0; a < 3; ++a) {
            if (std::abs(b[a]) < 1e-12)
                throw DegenerateError("model field component too small to carry a sign at r0");
            state.signs[i][a] = b[a] > 0 ? 1.0 : -1.0;
        }
    }
    state.initialized = true;
    return state;
}

PhaseWindow::PhaseWindow(std::size_t capacity) : buf_(capacity) {}

void PhaseWindow::push(double phase_rad) {
    const double s = std::sin(phase_rad), c = std::cos(phase_rad);
    const double d = has_last_ ? wrap_angle(phase_rad - last_phase_) : 0.0;
    if (count_ == buf_.size()) {
        const Entry& old = buf_[head_];
        sum_sin_ -= old.sin;
        sum_cos_ -= old.cos;
        sum_diff_ -= old.diff;
        if (old.has_diff)
            --diff_count_;
    } else {
        ++count_;
    }
    buf_[head_] = Entry{s, c, d, has_last_};
    sum_sin_ += s;
    sum_cos_ += c;
    sum_diff_ += d;
    if (has_last_)
        ++diff_count_;
    head_ = (head_ + 1) % buf_.size();
    last_phase_ = phase_rad;
    has_last_ = true;
}

void PhaseWindow::reset() {
    head_ = count_ = diff_count_ = 0;
    sum_sin_ = sum_cos_ = sum_diff_ = 0;
    has_last_ = false;
}

double PhaseWindow::circular_mean() const {
    return wrap_angle(std::atan2(sum_sin_, sum_cos_));
}

double PhaseWindow::circular_std() const {
    if (count_ == 0)
        return 0.0;
    double r = std::hypot(sum_sin_, sum_cos_) / static_cast<double>(count_);
    r = std::min(1.0, std::max(r, 1e-12));
    return std::sqrt(-2.0 * std::log(r));
}

double PhaseWindow::rate_rad_per_s(double fs_hz) const {
    if (diff_count_ == 0)
        return 0.0;
    return sum_diff_ / static_cast<double>(diff_count_) * fs_hz;
}

SignTracker::SignTracker(const BeaconSpec& beacon, double fs_hz, CrossingThresholds thresholds)
    : beacon_(beacon), fs_(fs_hz), th_(thresholds) {
    for (auto& coil : windows_)
        for (auto& w : coil)
            w = PhaseWindow(th_.window);
}

void SignTracker::init(const Vec3& r0) {
    state_ = init_signs_from_position(r0, beacon_);
    for (int i = 0; i < 3; ++i) {
        for (int a = 0; a < 3; ++a) {
            windows_[i][a].reset();
            anti_[i][a] = state_.signs[i][a] < 0; // negative component reads anti-phase
            flips_[i][a] = 0;
        }
    }
}

void SignTracker::update(const LiaOutput& lia) {
    if (!state_.initialized)
        throw NotInitializedError("sign tracker used before initialization");
    for (int i = 0; i < 3; ++i) {
        for (int a = 0; a < 3; ++a) {
            PhaseWindow& win = windows_[i][a];
            win.push(lia.phase[i][a]);
            const bool anti_now = std::abs(lia.phase[i][a]) > M_PI / 2.0;
            if (anti_now == anti_[i][a])
                continue;
            const bool valid = lia.amp[i][a] >= th_.amp_gate_gauss && win.full()
                               && win.circular_std() < th_.circ_std_max_rad
                               && std::abs(win.rate_rad_per_s(fs_)) < th_.rate_max_rad_per_s;
            if (!valid)
                continue; // held until the reading is trustworthy
            state_.signs[i][a] = -state_.signs[i][a];
            anti_[i][a] = anti_now;
            ++flips_[i][a];
        }
    }
}

} // namespace emloc
