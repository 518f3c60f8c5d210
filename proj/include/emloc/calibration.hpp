#pragma once

#include <span>
#include <vector>

#include "emloc/geometry.hpp"

namespace emloc {

/// Installation offset fitted from paired true and (averaged) estimated positions.
struct OffsetReport {
    Vec3 offset = Vec3::Zero(); // add to estimates to align them with truth
    std::vector<double> error_before_m;
    std::vector<double> error_after_m;
    std::size_t points = 0;
};

/// offset = mean(truth - estimate). Throws ArityError on mismatched lists or
/// fewer than two points.
OffsetReport offset_calibration(std::span<const Vec3> truth_points,
                                std::span<const Vec3> estimate_points);

struct FrequencyOffsetReport {
    double delta_f_hz = 0.0;   // signal frequency minus reference frequency
    double slope_rad_per_s = 0.0;
    bool stable = false;       // |delta_f| below the stability threshold
    std::size_t samples = 0;
};

/// Least-squares slope of the unwrapped phase series; delta_f = slope / (2 pi).
/// Throws InsufficientDataError when the series spans less than `min_span_s`.
FrequencyOffsetReport estimate_frequency_offset(std::span<const double> t_s,
                                                std::span<const double> phase_rad,
                                                double stable_threshold_hz = 0.005,
                                                double min_span_s = 5.0);

struct ErrorMetrics {
    double rmse_m = 0.0;
    double mean_m = 0.0;   // mean Euclidean error
    double std_m = 0.0;    // scatter of the Euclidean error
    Vec3 rmse_axis = Vec3::Zero();
    Vec3 mean_axis = Vec3::Zero();
    Vec3 std_axis = Vec3::Zero();
    std::vector<double> segment_errors_m; // est minus true distance per adjacent pair
    double segment_rmse_m = 0.0;
    std::size_t count = 0;
};

/// Standard positioning metrics plus adjacent-segment relative-distance errors
/// (offset-insensitive grid assessment). Throws ArityError on mismatched input.
ErrorMetrics error_metrics(std::span<const Vec3> estimates, std::span<const Vec3> truth);

/// Unwrapped copy of a wrapped phase series (cumulative +-2 pi correction).
std::vector<double> unwrap_phase(std::span<const double> phase_rad);

} // namespace emloc
