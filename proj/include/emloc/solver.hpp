#pragma once

#include <array>

#include "emloc/field.hpp"
#include "emloc/geometry.hpp"
#include "emloc/lia.hpp"
#include "emloc/sign_tracking.hpp"

namespace emloc {

/// Reference frame established when the external (vision) fix hands over: initial
/// relative position, the navigation attitude at that instant, and the beacon yaw
/// the frame was aligned to.
struct HandshakeFrame {
    Vec3 r0 = Vec3::Zero();
    Attitude nav_attitude_at_handshake;
    double beacon_yaw_at_handshake = 0.0;
};

/// Validates the fix and freezes the reference frame. Throws RangeError when |r0|
/// is outside (min_range_m, max_range_m].
HandshakeFrame handshake_init(const Vec3& marker_r0, const Attitude& nav_attitude,
                              double beacon_yaw = 0.0, double max_range_m = 2.5,
                              double min_range_m = 0.12);

enum class EstimateFlag { raw, smoothed, gated, outlier_rejected };

const char* to_string(EstimateFlag flag);

struct PoseEstimate {
    double t = 0.0;
    Vec3 r = Vec3::Zero(); // beacon frame, meters
    double beacon_yaw = 0.0;
    double residual_norm = 0.0; // norm of the nine field residuals, Gauss
    EstimateFlag flag = EstimateFlag::raw;
};

struct SolverOptions {
    double gate_gauss = 0.03;     // at least one amplitude component must exceed this
    double max_range_m = 2.5;     // penalty ball radius
    double penalty_ramp_m = 0.5;  // hinge scale; penalty reaches w_pen at max_range + ramp
    double lambda0 = 1e-3;
    double lambda_factor = 10.0;
    double step_tol = 1e-8;
    double cost_tol = 1e-12;
    int max_iter = 100;
};

/// Signed amplitude measurements in the handshake frame.
struct Measurement {
    std::array<Vec3, 3> amp{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    SignState signs;
};

using ResidualVec = Eigen::Matrix<double, 10, 1>;
using ResidualJac = Eigen::Matrix<double, 10, 4>;

/// Ten-component residual at (r, beacon_yaw): per coil, model envelope field minus the
/// sign-restored measured amplitudes derotated by the beacon yaw candidate; the last
/// component is the out-of-range penalty w_pen * max(0, |r| - max_range) / ramp.
/// Throws DomainError inside the beacon core.
ResidualVec solver_residual(const Vec3& r, double beacon_yaw, const Measurement& meas,
                            const BeaconSpec& beacon, double w_pen, const SolverOptions& opt = {});

/// Residual plus its analytic Jacobian with respect to (x, y, z, beacon_yaw).
void solver_residual_jacobian(const Vec3& r, double beacon_yaw, const Measurement& meas,
                              const BeaconSpec& beacon, double w_pen, const SolverOptions& opt,
                              ResidualVec& f, ResidualJac& jac);

enum class SolveStatus { ok, gated_weak_signal, no_convergence };

struct SolveResult {
    SolveStatus status = SolveStatus::no_convergence;
    PoseEstimate estimate;
    int iterations = 0;
};

/// Levenberg-Marquardt fit of (x, y, z, beacon_yaw) to the demodulated amplitudes.
/// Beacon pitch and roll are held at zero. Weak signals (all amplitudes below the
/// gate) are reported, not solved.
SolveResult solve_position(const LiaOutput& lia, const SignState& signs,
                           const BeaconSpec& beacon, const PoseEstimate& guess,
                           const SolverOptions& opt = {});

} // namespace emloc
