#include <doctest.h>

#include <cmath>
#include <random>

#include "emloc/errors.hpp"
#include "emloc/solver.hpp"
#include "helpers.hpp"

using namespace emloc;

namespace {

// Noiseless demodulator output for a sensor at handshake-frame position p with the
// beacon yawed by `beacon_yaw` since the handshake.
LiaOutput synth_lia(const BeaconSpec& beacon, const Vec3& p, double beacon_yaw, double t = 0.0) {
    const Mat3 rb = rot_z(beacon_yaw);
    const Vec3 r_beacon = rb.transpose() * p;
    LiaOutput lia;
    lia.t = t;
    lia.ready = true;
    for (int i = 0; i < 3; ++i) {
        const Vec3 field = rb * dipole_peak_field(beacon.coils[i], r_beacon);
        lia.amp[i] = field.cwiseAbs();
        for (int a = 0; a < 3; ++a)
            lia.phase[i][a] = field[a] >= 0 ? 0.0 : M_PI;
    }
    return lia;
}

SignState synth_signs(const BeaconSpec& beacon, const Vec3& p, double beacon_yaw) {
    const Mat3 rb = rot_z(beacon_yaw);
    const Vec3 r_beacon = rb.transpose() * p;
    SignState s;
    for (int i = 0; i < 3; ++i) {
        const Vec3 field = rb * dipole_peak_field(beacon.coils[i], r_beacon);
        for (int a = 0; a < 3; ++a)
            s.signs[i][a] = field[a] >= 0 ? 1.0 : -1.0;
    }
    s.initialized = true;
    return s;
}

Measurement synth_measurement(const BeaconSpec& beacon, const Vec3& p, double beacon_yaw) {
    const LiaOutput lia = synth_lia(beacon, p, beacon_yaw);
    Measurement m;
    m.amp = lia.amp;
    m.signs = synth_signs(beacon, p, beacon_yaw);
    return m;
}

} // namespace

TEST_CASE("handshake_init") {
    const HandshakeFrame f = handshake_init(Vec3(1.4, 0, 0), Attitude{});
    CHECK(f.r0 == Vec3(1.4, 0, 0));
    CHECK(compose_attitude(attitude_delta(Attitude{}, f.nav_attitude_at_handshake))
              .isApprox(Mat3::Identity(), 1e-15));

    CHECK_THROWS_AS(handshake_init(Vec3(3.0, 0, 0), Attitude{}), RangeError);
    CHECK_THROWS_AS(handshake_init(Vec3(0.05, 0, 0), Attitude{}), RangeError);

    // relative yaw feeds the derotation
    const HandshakeFrame g = handshake_init(Vec3(1.0, 0, 0), Attitude{0, 0, 0.2});
    const Attitude later{0, 0, 0.5};
    CHECK(attitude_delta(later, g.nav_attitude_at_handshake).yaw_rad == doctest::Approx(0.3));
}

TEST_CASE("residual") {
    const BeaconSpec beacon = default_beacon();
    const Vec3 truth(0.3, 0.2, 0.4);
    const Measurement meas = synth_measurement(beacon, truth, 0.0);
    const double w_pen = 1.0;

    SUBCASE("zero at the ground truth") {
        const ResidualVec f = solver_residual(truth, 0.0, meas, beacon, w_pen);
        CHECK(f.head<9>().norm() < 1e-9);
        CHECK(f(9) == 0.0);
    }

    SUBCASE("penalty reaches w_pen at 3 m") {
        const Vec3 far = Vec3(3.0, 0, 0);
        const ResidualVec f = solver_residual(far, 0.0, meas, beacon, w_pen);
        CHECK(f(9) == doctest::Approx(w_pen).epsilon(1e-12));
    }

    SUBCASE("perturbing the truth raises the norm") {
        const ResidualVec f = solver_residual(truth + Vec3(0.01, 0, 0), 0.0, meas, beacon, w_pen);
        CHECK(f.head<9>().norm() > 1e-5);
    }

    SUBCASE("inside the core is out of domain") {
        CHECK_THROWS_AS(solver_residual(Vec3(0.05, 0, 0), 0.0, meas, beacon, w_pen), DomainError);
    }
}

TEST_CASE("analytic Jacobian matches central differences") {
    const BeaconSpec beacon = default_beacon();
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> yaw_dist(-0.5, 0.5);
    for (int k = 0; k < 20; ++k) {
        const Vec3 p = oracle::random_position(rng, 0.25, 1.2);
        const double yaw = yaw_dist(rng);
        const Measurement meas = synth_measurement(beacon, p, yaw);
        const Vec3 at = p + Vec3(0.03, -0.02, 0.01); // off the optimum; nonzero residual
        const double w_pen = 0.5;

        ResidualVec f;
        ResidualJac jac;
        solver_residual_jacobian(at, yaw, meas, beacon, w_pen, SolverOptions{}, f, jac);

        const double h = 1e-6;
        for (int j = 0; j < 4; ++j) {
            Vec3 rp = at, rm = at;
            double yp = yaw, ym = yaw;
            if (j < 3) {
                rp[j] += h;
                rm[j] -= h;
            } else {
                yp += h;
                ym -= h;
            }
            const ResidualVec fd =
                (solver_residual(rp, yp, meas, beacon, w_pen)
                 - solver_residual(rm, ym, meas, beacon, w_pen)) / (2 * h);
            const double scale = std::max(1.0, fd.norm());
            CHECK((jac.col(j) - fd).norm() / scale < 1e-6);
        }
    }
}

TEST_CASE("solve_position") {
    const BeaconSpec beacon = default_beacon();
    SolverOptions opt;

    SUBCASE("noiseless round trip") {
        const Vec3 truth(0.3, 0.2, 0.4);
        const LiaOutput lia = synth_lia(beacon, truth, 0.0);
        const SignState signs = synth_signs(beacon, truth, 0.0);
        PoseEstimate guess;
        guess.r = Vec3(0.4, 0.3, 0.5);
        const SolveResult res = solve_position(lia, signs, beacon, guess, opt);
        CHECK(res.status == SolveStatus::ok);
        CHECK((res.estimate.r - truth).norm() < 1e-4);
        CHECK(std::abs(res.estimate.beacon_yaw) < 0.01);
    }

    SUBCASE("weak signal is gated") {
        LiaOutput lia = synth_lia(beacon, Vec3(0.3, 0.2, 0.4), 0.0);
        for (auto& a : lia.amp)
            a = Vec3::Constant(0.01);
        const SignState signs = synth_signs(beacon, Vec3(0.3, 0.2, 0.4), 0.0);
        PoseEstimate guess;
        guess.r = Vec3(0.3, 0.2, 0.4);
        const SolveResult res = solve_position(lia, signs, beacon, guess, opt);
        CHECK(res.status == SolveStatus::gated_weak_signal);
        CHECK(res.estimate.flag == EstimateFlag::gated);
    }

    SUBCASE("gate boundary") {
        LiaOutput lia;
        lia.ready = true;
        for (auto& a : lia.amp)
            a = Vec3::Constant(0.029);
        SignState signs;
        signs.initialized = true;
        PoseEstimate guess;
        guess.r = Vec3(0.3, 0.2, 0.4);
        CHECK(solve_position(lia, signs, beacon, guess, opt).status
              == SolveStatus::gated_weak_signal);
        lia.amp[1][2] = 0.031; // one component over the gate is enough to attempt
        CHECK(solve_position(lia, signs, beacon, guess, opt).status != SolveStatus::gated_weak_signal);
    }

    SUBCASE("recovers the beacon yaw") {
        const double yaw = 30.0 * M_PI / 180.0;
        const Vec3 p(0.35, 0.2, 0.3); // handshake-frame position
        const LiaOutput lia = synth_lia(beacon, p, yaw);
        const SignState signs = synth_signs(beacon, p, yaw);
        PoseEstimate guess;
        guess.r = p;
        const SolveResult res = solve_position(lia, signs, beacon, guess, opt);
        CHECK(res.status == SolveStatus::ok);
        CHECK(res.estimate.beacon_yaw == doctest::Approx(yaw).epsilon(0.5 * M_PI / 180.0 / yaw));
        CHECK((res.estimate.r - rot_z(yaw).transpose() * p).norm() < 1e-3);
    }

    SUBCASE("penalty keeps the iterates inside the detection ball") {
        const Vec3 truth(0.35, 0.25, 0.2);
        const LiaOutput lia = synth_lia(beacon, truth, 0.0);
        const SignState signs = synth_signs(beacon, truth, 0.0);
        PoseEstimate guess;
        guess.r = Vec3(1.7, 1.2, 1.0); // |r| = 2.3, near the boundary
        const SolveResult res = solve_position(lia, signs, beacon, guess, opt);
        CHECK(res.estimate.r.norm() <= 2.5);
        CHECK(res.status == SolveStatus::ok);
        CHECK((res.estimate.r - truth).norm() < 1e-3);
    }

    SUBCASE("iteration budget exhaustion reports no convergence") {
        const Vec3 truth(0.3, 0.2, 0.4);
        const LiaOutput lia = synth_lia(beacon, truth, 0.0);
        const SignState signs = synth_signs(beacon, truth, 0.0);
        PoseEstimate guess;
        guess.r = Vec3(1.5, -1.2, 0.9); // far from the optimum
        SolverOptions strangled = opt;
        strangled.max_iter = 2;
        const SolveResult res = solve_position(lia, signs, beacon, guess, strangled);
        CHECK(res.status == SolveStatus::no_convergence);
        CHECK(res.iterations == 2);
    }

    SUBCASE("randomized round trips across the workspace") {
        std::mt19937 rng(47);
        for (int k = 0; k < 50; ++k) {
            const Vec3 truth = oracle::random_position(rng, 0.2, 1.5);
            const LiaOutput lia = synth_lia(beacon, truth, 0.0);
            const SignState signs = synth_signs(beacon, truth, 0.0);
            PoseEstimate guess;
            guess.r = truth + Vec3(0.05, -0.05, 0.05);
            SolverOptions open = opt;
            open.gate_gauss = 0.0; // far poses drop below the activation gate
            const SolveResult res = solve_position(lia, signs, beacon, guess, open);
            CHECK(res.status == SolveStatus::ok);
            CHECK((res.estimate.r - truth).norm() < 1e-3);
            CHECK(std::abs(wrap_angle(res.estimate.beacon_yaw)) < 0.01);
        }
    }
}
