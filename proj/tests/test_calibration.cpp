#include <doctest.h>

#include <cmath>
#include <random>

#include "emloc/calibration.hpp"
#include "emloc/errors.hpp"
#include "helpers.hpp"

using namespace emloc;

TEST_CASE("offset_calibration") {
    std::vector<Vec3> truth;
    for (double x : {0.1, 0.2, 0.3, 0.4})
        for (double y : {0.1, 0.2, 0.3, 0.4})
            truth.emplace_back(x, y, 0.25);

    SUBCASE("zero error, zero offset") {
        const auto report = offset_calibration(truth, truth);
        CHECK(report.offset.norm() == 0.0);
        for (double e : report.error_after_m)
            CHECK(e == 0.0);
    }

    SUBCASE("recovers a uniform installation shift") {
        const Vec3 shift(0.102, 0.058, 0.003);
        std::vector<Vec3> estimates;
        for (const auto& p : truth)
            estimates.push_back(p - shift);
        const auto report = offset_calibration(truth, estimates);
        CHECK((report.offset - shift).norm() < 1e-12);
        for (double e : report.error_after_m)
            CHECK(e < 1e-12);
    }

    SUBCASE("zero-mean noise shrinks with the point count") {
        std::mt19937_64 rng(12);
        std::normal_distribution<double> noise(0.0, 0.01);
        std::vector<Vec3> estimates;
        for (const auto& p : truth)
            estimates.push_back(p + Vec3(noise(rng), noise(rng), noise(rng)));
        const auto report = offset_calibration(truth, estimates);
        CHECK(report.offset.norm() < 0.01); // 16 points at 1 cm noise
    }

    SUBCASE("translation equivariance") {
        const Vec3 v(0.05, -0.02, 0.07);
        std::vector<Vec3> estimates;
        for (const auto& p : truth)
            estimates.push_back(p + Vec3(0.01, 0.02, -0.01));
        const auto base = offset_calibration(truth, estimates);
        for (auto& e : estimates)
            e += v;
        const auto shifted = offset_calibration(truth, estimates);
        CHECK((shifted.offset - (base.offset - v)).norm() < 1e-12);
    }

    SUBCASE("arity") {
        std::vector<Vec3> one{Vec3(0, 0, 1)};
        CHECK_THROWS_AS(offset_calibration(one, one), ArityError);
        std::vector<Vec3> two{Vec3(0, 0, 1), Vec3(0, 0, 2)};
        CHECK_THROWS_AS(offset_calibration(two, one), ArityError);
    }
}

namespace {

// Sampled phase ramp as a wrapped series.
void make_ramp(double df_hz, double duration_s, double fs, std::vector<double>& t,
               std::vector<double>& phase, double phase0 = 0.0) {
    const auto n = static_cast<std::size_t>(duration_s * fs);
    for (std::size_t k = 0; k < n; ++k) {
        const double tk = static_cast<double>(k) / fs;
        t.push_back(tk);
        phase.push_back(wrap_angle(phase0 + 2.0 * M_PI * df_hz * tk));
    }
}

} // namespace

TEST_CASE("estimate_frequency_offset") {
    SUBCASE("constant phase is stable at zero") {
        std::vector<double> t, phase;
        make_ramp(0.0, 8.0, 200.0, t, phase, 0.7);
        const auto report = estimate_frequency_offset(t, phase);
        CHECK(report.delta_f_hz == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(report.stable);
    }

    SUBCASE("recovers a 0.05 Hz mistune from a wrapped ramp") {
        std::vector<double> t, phase;
        make_ramp(0.05, 30.0, 200.0, t, phase);
        const auto report = estimate_frequency_offset(t, phase);
        CHECK(report.delta_f_hz == doctest::Approx(0.05).epsilon(0.05));
        CHECK(!report.stable);
    }

    SUBCASE("recovers the synthesizer error sign") {
        // transmitted 15.904 Hz against a 16.00 Hz reference
        std::vector<double> t, phase;
        make_ramp(15.904 - 16.0, 30.0, 200.0, t, phase);
        const auto report = estimate_frequency_offset(t, phase);
        CHECK(report.delta_f_hz == doctest::Approx(-0.096).epsilon(0.02));
        CHECK(!report.stable);
    }

    SUBCASE("doubling the mistune doubles the estimate") {
        std::vector<double> t1, p1, t2, p2;
        make_ramp(0.02, 20.0, 200.0, t1, p1);
        make_ramp(0.04, 20.0, 200.0, t2, p2);
        const auto a = estimate_frequency_offset(t1, p1);
        const auto b = estimate_frequency_offset(t2, p2);
        CHECK(b.delta_f_hz == doctest::Approx(2.0 * a.delta_f_hz).epsilon(0.01));
    }

    SUBCASE("short series is rejected") {
        std::vector<double> t, phase;
        make_ramp(0.05, 3.0, 200.0, t, phase);
        CHECK_THROWS_AS(estimate_frequency_offset(t, phase), InsufficientDataError);
    }
}

TEST_CASE("error_metrics") {
    std::vector<Vec3> truth;
    for (double x : {0.1, 0.2, 0.3})
        truth.emplace_back(x, 0.2, 0.25);

    SUBCASE("identical sequences zero every metric") {
        const auto m = error_metrics(truth, truth);
        CHECK(m.rmse_m == 0.0);
        CHECK(m.mean_m == 0.0);
        CHECK(m.std_m == 0.0);
        CHECK(m.segment_rmse_m == 0.0);
    }

    SUBCASE("constant offset keeps segment errors at zero") {
        std::vector<Vec3> shifted;
        for (const auto& p : truth)
            shifted.push_back(p + Vec3(0.03, 0, 0));
        const auto m = error_metrics(shifted, truth);
        CHECK(m.rmse_m == doctest::Approx(0.03).epsilon(1e-12));
        CHECK(m.mean_m == doctest::Approx(0.03).epsilon(1e-12));
        for (double e : m.segment_errors_m)
            CHECK(std::abs(e) < 1e-12);
    }

    SUBCASE("matches an independent RMSE computation") {
        std::mt19937_64 rng(77);
        std::normal_distribution<double> noise(0.0, 0.02);
        std::vector<Vec3> estimates;
        std::vector<double> sq;
        for (const auto& p : truth) {
            const Vec3 dev(noise(rng), noise(rng), noise(rng));
            estimates.push_back(p + dev);
            sq.push_back(dev.squaredNorm());
        }
        const auto m = error_metrics(estimates, truth);
        CHECK(m.rmse_m == doctest::Approx(std::sqrt(oracle::mean(sq))).epsilon(1e-12));
    }

    SUBCASE("arity") {
        std::vector<Vec3> shorter(truth.begin(), truth.begin() + 2);
        CHECK_THROWS_AS(error_metrics(shorter, truth), ArityError);
        CHECK_THROWS_AS(error_metrics(std::vector<Vec3>{}, std::vector<Vec3>{}), ArityError);
    }
}

TEST_CASE("unwrap_phase") {
    std::vector<double> t, phase;
    make_ramp(0.3, 10.0, 50.0, t, phase);
    const auto un = unwrap_phase(phase);
    for (std::size_t i = 0; i < un.size(); ++i)
        CHECK(un[i] == doctest::Approx(2.0 * M_PI * 0.3 * t[i]).epsilon(1e-9));
}
