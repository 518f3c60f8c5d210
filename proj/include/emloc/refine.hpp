#pragma once

#include <cstddef>
#include <deque>

#include "emloc/solver.hpp"

namespace emloc {

struct RefineOptions {
    double max_speed_mps = 0.15;  // maximum plausible vehicle speed
    double sigma_mult = 3.0;      // slack in multiples of recent estimate scatter
    double min_sigma_m = 0.015;   // scatter floor while the window is still warming up
    std::size_t sigma_warmup = 10;
    std::size_t window = 50;      // moving-average length
};

/// Rejects raw solves that imply implausible motion since the last accepted one and
/// smooths the survivors with a moving average over the most recent window.
class EstimateRefiner {
public:
    EstimateRefiner(const Vec3& anchor, double t0, RefineOptions opt = {});

    struct Outcome {
        bool accepted = false;
        PoseEstimate estimate; // smoothed when accepted, flagged outlier-rejected otherwise
    };

    Outcome push(const PoseEstimate& raw);

    std::size_t window_size() const { return window_.size(); }
    std::size_t accepted_count() const { return accepted_; }

    /// RMS scatter of the windowed raw positions around their mean.
    double sigma_m() const;

private:
    RefineOptions opt_;
    Vec3 last_r_;
    double last_t_;
    std::deque<PoseEstimate> window_;
    std::size_t accepted_ = 0;
};

} // namespace emloc
