#include "emloc/calibration.hpp"

#include <cmath>

#include "emloc/errors.hpp"

namespace emloc {

OffsetReport offset_calibration(std::span<const Vec3> truth, std::span<const Vec3> estimates) {
    if (truth.size() != estimates.size())
        throw ArityError("offset calibration needs equal-length point lists");
    if (truth.size() < 2)
        throw ArityError("offset calibration needs at least two points");

    OffsetReport report;
    report.points = truth.size();
    Vec3 sum = Vec3::Zero();
    for (std::size_t i = 0; i < truth.size(); ++i)
        sum += truth[i] - estimates[i];
    report.offset = sum / static_cast<double>(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        report.error_before_m.push_back((truth[i] - estimates[i]).norm());
        report.error_after_m.push_back((truth[i] - (estimates[i] + report.offset)).norm());
    }
    return report;
}

std::vector<double> unwrap_phase(std::span<const double> phase_rad) {
    std::vector<double> out;
    out.reserve(phase_rad.size());
    if (phase_rad.empty())
        return out;
    out.push_back(phase_rad[0]);
    for (std::size_t i = 1; i < phase_rad.size(); ++i)
        out.push_back(out.back() + wrap_angle(phase_rad[i] - phase_rad[i - 1]));
    return out;
}

FrequencyOffsetReport estimate_frequency_offset(std::span<const double> t_s,
                                                std::span<const double> phase_rad,
                                                double stable_threshold_hz, double min_span_s) {
    if (t_s.size() != phase_rad.size())
        throw ArityError("time and phase series must have equal length");
    if (t_s.size() < 2 || t_s.back() - t_s.front() < min_span_s)
        throw InsufficientDataError("phase series must span at least "
                                    + std::to_string(min_span_s) + " s");

    const std::vector<double> unwrapped = unwrap_phase(phase_rad);
    const double n = static_cast<double>(t_s.size());
    double st = 0, sp = 0, stt = 0, stp = 0;
    for (std::size_t i = 0; i < t_s.size(); ++i) {
        st += t_s[i];
        sp += unwrapped[i];
        stt += t_s[i] * t_s[i];
        stp += t_s[i] * unwrapped[i];
    }
    const double denom = n * stt - st * st;
    if (std::abs(denom) < 1e-30)
        throw InsufficientDataError("phase series has no time spread");
    FrequencyOffsetReport report;
    report.slope_rad_per_s = (n * stp - st * sp) / denom;
    report.delta_f_hz = report.slope_rad_per_s / (2.0 * M_PI);
    report.stable = std::abs(report.delta_f_hz) < stable_threshold_hz;
    report.samples = t_s.size();
    return report;
}

ErrorMetrics error_metrics(std::span<const Vec3> estimates, std::span<const Vec3> truth) {
    if (estimates.size() != truth.size())
        throw ArityError("estimate and truth sequences must have equal length");
    if (estimates.empty())
        throw ArityError("error metrics need at least one sample");

    ErrorMetrics m;
    m.count = estimates.size();
    const double n = static_cast<double>(estimates.size());

    double sq = 0, lin = 0;
    Vec3 sq_axis = Vec3::Zero(), lin_axis = Vec3::Zero();
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const Vec3 e = estimates[i] - truth[i];
        sq += e.squaredNorm();
        lin += e.norm();
        sq_axis += e.cwiseProduct(e);
        lin_axis += e;
    }
    m.rmse_m = std::sqrt(sq / n);
    m.mean_m = lin / n;
    m.rmse_axis = (sq_axis / n).cwiseSqrt();
    m.mean_axis = lin_axis / n;

    double var = 0;
    Vec3 var_axis = Vec3::Zero();
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const Vec3 e = estimates[i] - truth[i];
        var += (e.norm() - m.mean_m) * (e.norm() - m.mean_m);
        const Vec3 d = e - m.mean_axis;
        var_axis += d.cwiseProduct(d);
    }
    m.std_m = std::sqrt(var / n);
    m.std_axis = (var_axis / n).cwiseSqrt();

    double seg_sq = 0;
    for (std::size_t i = 0; i + 1 < estimates.size(); ++i) {
        const double d_est = (estimates[i + 1] - estimates[i]).norm();
        const double d_true = (truth[i + 1] - truth[i]).norm();
        m.segment_errors_m.push_back(d_est - d_true);
        seg_sq += (d_est - d_true) * (d_est - d_true);
    }
    if (!m.segment_errors_m.empty())
        m.segment_rmse_m = std::sqrt(seg_sq / static_cast<double>(m.segment_errors_m.size()));
    return m;
}

} // namespace emloc
