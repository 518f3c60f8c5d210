#include "emloc/solver.hpp"

#include <cmath>
#include <limits>

#include "emloc/errors.hpp"

namespace emloc {

HandshakeFrame handshake_init(const Vec3& marker_r0, const Attitude& nav_attitude,
                              double beacon_yaw, double max_range_m, double min_range_m) {
    const double d = marker_r0.norm();
    if (d > max_range_m)
        throw RangeError("handshake fix at " + std::to_string(d) + " m exceeds "
                         + std::to_string(max_range_m) + " m detection range");
    if (d <= min_range_m)
        throw RangeError("handshake fix inside the beacon core");
    return HandshakeFrame{marker_r0, nav_attitude, beacon_yaw};
}

const char* to_string(EstimateFlag flag) {
    switch (flag) {
    case EstimateFlag::raw: return "raw";
    case EstimateFlag::smoothed: return "smoothed";
    case EstimateFlag::gated: return "gated";
    case EstimateFlag::outlier_rejected: return "outlier-rejected";
    }
    return "unknown";
}

namespace {

Vec3 signed_measurement(const Measurement& meas, int coil) {
    return meas.amp[coil].cwiseProduct(meas.signs.signs[coil]);
}

double penalty_value(double range, double w_pen, const SolverOptions& opt) {
    const double over = range - opt.max_range_m;
    return over > 0 ? w_pen * over / opt.penalty_ramp_m : 0.0;
}

} // namespace

ResidualVec solver_residual(const Vec3& r, double beacon_yaw, const Measurement& meas,
                            const BeaconSpec& beacon, double w_pen, const SolverOptions& opt) {
    const Mat3 derot = rot_z(-beacon_yaw);
    ResidualVec f;
    for (int i = 0; i < 3; ++i) {
        const Vec3 model = dipole_peak_field(beacon.coils[i], r, beacon.permeability_rel,
                                             beacon.core_diameter_m);
        f.segment<3>(3 * i) = model - derot * signed_measurement(meas, i);
    }
    f(9) = penalty_value(r.norm(), w_pen, opt);
    return f;
}

void solver_residual_jacobian(const Vec3& r, double beacon_yaw, const Measurement& meas,
                              const BeaconSpec& beacon, double w_pen, const SolverOptions& opt,
                              ResidualVec& f, ResidualJac& jac) {
    const Mat3 derot = rot_z(-beacon_yaw);
    // d/dyaw of Rz(-yaw)
    Mat3 dderot;
    const double c = std::cos(beacon_yaw), s = std::sin(beacon_yaw);
    dderot << -s, c, 0,
              -c, -s, 0,
              0, 0, 0;
    jac.setZero();
    for (int i = 0; i < 3; ++i) {
        const Vec3 model = dipole_peak_field(beacon.coils[i], r, beacon.permeability_rel,
                                             beacon.core_diameter_m);
        const Vec3 m = signed_measurement(meas, i);
        f.segment<3>(3 * i) = model - derot * m;
        jac.block<3, 3>(3 * i, 0) = dipole_peak_gradient(beacon.coils[i], r,
                                                         beacon.permeability_rel,
                                                         beacon.core_diameter_m);
        jac.block<3, 1>(3 * i, 3) = -dderot * m;
    }
    const double range = r.norm();
    f(9) = penalty_value(range, w_pen, opt);
    if (range > opt.max_range_m && range > 0)
        jac.block<1, 3>(9, 0) = (w_pen / opt.penalty_ramp_m) * (r / range).transpose();
}

SolveResult solve_position(const LiaOutput& lia, const SignState& signs,
                           const BeaconSpec& beacon, const PoseEstimate& guess,
                           const SolverOptions& opt) {
    if (!signs.initialized)
        throw NotInitializedError("solve_position called before sign initialization");

    const double max_amp = lia.max_amp();
    SolveResult result;
    result.estimate = guess;
    result.estimate.t = lia.t;
    if (max_amp < opt.gate_gauss) {
        result.status = SolveStatus::gated_weak_signal;
        result.estimate.flag = EstimateFlag::gated;
        return result;
    }

    Measurement meas;
    meas.amp = lia.amp;
    meas.signs = signs;
    const double w_pen = 10.0 * max_amp;

    // keep the starting point where the model is defined
    Eigen::Vector4d params;
    params.head<3>() = guess.r;
    params(3) = guess.beacon_yaw;
    const double min_radius = beacon.core_diameter_m * 1.2;
    const double start_radius = params.head<3>().norm();
    if (start_radius < min_radius) {
        Vec3 dir = start_radius > 1e-12 ? Vec3(params.head<3>() / start_radius) : Vec3::UnitZ();
        params.head<3>() = dir * min_radius;
    }

    const auto inside_core = [&](const Eigen::Vector4d& p) {
        return p.head<3>().norm() <= beacon.core_diameter_m;
    };

    ResidualVec f;
    ResidualJac jac;
    solver_residual_jacobian(params.head<3>(), params(3), meas, beacon, w_pen, opt, f, jac);
    double cost = 0.5 * f.squaredNorm();

    double lambda = opt.lambda0;
    bool converged = false;
    int iter = 0;
    while (iter < opt.max_iter && !converged) {
        ++iter;
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Eigen::Vector4d jtf = jac.transpose() * f;
        if (jtf.norm() < 1e-14) {
            converged = true;
            break;
        }
        bool accepted = false;
        while (!accepted) {
            Eigen::Matrix4d damped = jtj;
            for (int d = 0; d < 4; ++d)
                damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
            const Eigen::Vector4d delta = damped.ldlt().solve(-jtf);
            const Eigen::Vector4d trial = params + delta;
            double trial_cost = std::numeric_limits<double>::infinity();
            if (!inside_core(trial)) {
                const ResidualVec trial_f = solver_residual(trial.head<3>(), trial(3), meas,
                                                            beacon, w_pen, opt);
                trial_cost = 0.5 * trial_f.squaredNorm();
            }
            if (trial_cost < cost) {
                const double improvement = cost - trial_cost;
                params = trial;
                cost = trial_cost;
                lambda = std::max(lambda / opt.lambda_factor, 1e-12);
                accepted = true;
                if (delta.norm() < opt.step_tol || improvement < opt.cost_tol)
                    converged = true;
            } else {
                lambda *= opt.lambda_factor;
                if (lambda > 1e12)
                    break; // no usable step at any damping
            }
        }
        if (!accepted)
            break;
        if (!converged)
            solver_residual_jacobian(params.head<3>(), params(3), meas, beacon, w_pen, opt, f, jac);
    }

    result.iterations = iter;
    result.estimate.r = params.head<3>();
    result.estimate.beacon_yaw = wrap_angle(params(3));
    const ResidualVec final_f = solver_residual(params.head<3>(), params(3), meas, beacon,
                                                w_pen, opt);
    result.estimate.residual_norm = final_f.head<9>().norm();
    result.estimate.flag = EstimateFlag::raw;
    result.status = converged ? SolveStatus::ok : SolveStatus::no_convergence;
    return result;
}

} // namespace emloc
