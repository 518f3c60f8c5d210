#include "emloc/refine.hpp"

#include <cmath>

namespace emloc {

EstimateRefiner::EstimateRefiner(const Vec3& anchor, double t0, RefineOptions opt)
    : opt_(opt), last_r_(anchor), last_t_(t0) {}

double EstimateRefiner::sigma_m() const {
    if (window_.size() < 2)
        return 0.0;
    Vec3 mean = Vec3::Zero();
    for (const auto& e : window_)
        mean += e.r;
    mean /= static_cast<double>(window_.size());
    double acc = 0.0;
    for (const auto& e : window_)
        acc += (e.r - mean).squaredNorm();
    return std::sqrt(acc / static_cast<double>(window_.size()));
}

EstimateRefiner::Outcome EstimateRefiner::push(const PoseEstimate& raw) {
    const double dt = std::max(raw.t - last_t_, 0.0);
    double sigma = sigma_m();
    if (accepted_ < opt_.sigma_warmup)
        sigma = std::max(sigma, opt_.min_sigma_m);
    const double bound = opt_.max_speed_mps * dt + opt_.sigma_mult * sigma;
    if ((raw.r - last_r_).norm() > bound) {
        Outcome out;
        out.accepted = false;
        out.estimate = raw;
        out.estimate.flag = EstimateFlag::outlier_rejected;
        return out;
    }

    window_.push_back(raw);
    while (window_.size() > opt_.window)
        window_.pop_front();
    last_r_ = raw.r;
    last_t_ = raw.t;
    ++accepted_;

    Vec3 mean_r = Vec3::Zero();
    double yaw_sin = 0.0, yaw_cos = 0.0;
    double mean_res = 0.0;
    for (const auto& e : window_) {
        mean_r += e.r;
        yaw_sin += std::sin(e.beacon_yaw);
        yaw_cos += std::cos(e.beacon_yaw);
        mean_res += e.residual_norm;
    }
    const double n = static_cast<double>(window_.size());

    Outcome out;
    out.accepted = true;
    out.estimate.t = raw.t;
    out.estimate.r = mean_r / n;
    out.estimate.beacon_yaw = wrap_angle(std::atan2(yaw_sin, yaw_cos));
    out.estimate.residual_norm = mean_res / n;
    out.estimate.flag = EstimateFlag::smoothed;
    return out;
}

} // namespace emloc
