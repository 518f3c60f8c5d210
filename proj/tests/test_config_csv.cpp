#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "emloc/config.hpp"
#include "emloc/csv.hpp"
#include "emloc/errors.hpp"

using namespace emloc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "emloc_test_io";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("default config reproduces the reference setup") {
    const RunConfig c = default_config();
    CHECK(c.scenario.beacon.coils[0].freq_hz == 16.0);
    CHECK(c.scenario.beacon.coils[1].freq_hz == 20.0);
    CHECK(c.scenario.beacon.coils[2].freq_hz == 25.0);
    CHECK(c.scenario.sensor.fs_hz == 200.0);
    CHECK(c.scenario.sensor.resolution_gauss == doctest::Approx(1.5e-3));
    CHECK(c.scenario.geomag_gauss == Vec3(0.2, 0.13, 0.35));
    CHECK(c.pipeline.solver.gate_gauss == doctest::Approx(0.03));
    CHECK(c.pipeline.refine.max_speed_mps == doctest::Approx(0.15));
    CHECK(c.pipeline.refine.window == 50);
    CHECK(c.pipeline.crossing.window == 200);
    CHECK(c.scenario.grid.points.size() == 16);
    CHECK(c.scenario.grid.min_solutions == 600);
}

TEST_CASE("config parsing") {
    SUBCASE("empty document gives the defaults") {
        const RunConfig c = config_from_json(nlohmann::json::object());
        CHECK(c.scenario.kind == Scenario::Kind::static_grid);
        CHECK(c.scenario.grid.points.size() == 16);
    }

    SUBCASE("unknown keys are rejected with their path") {
        nlohmann::json doc;
        doc["pipeline"]["gate_gaus"] = 0.05; // typo
        try {
            config_from_json(doc);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("pipeline.gate_gaus") != std::string::npos);
        }
    }

    SUBCASE("beacon section requires its coils") {
        nlohmann::json doc;
        doc["beacon"]["core_diameter_m"] = 0.12;
        try {
            config_from_json(doc);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("beacon.coils") != std::string::npos);
        }
    }

    SUBCASE("round trip through json") {
        RunConfig c = default_config();
        c.pipeline.solver.gate_gauss = 0.045;
        c.scenario.kind = Scenario::Kind::dynamic_path;
        const RunConfig back = config_from_json(config_to_json(c));
        CHECK(back.pipeline.solver.gate_gauss == doctest::Approx(0.045));
        CHECK(back.scenario.kind == Scenario::Kind::dynamic_path);
    }

    SUBCASE("type mismatches are config errors") {
        nlohmann::json doc;
        doc["seed"] = "not a number";
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
        nlohmann::json doc2;
        doc2["pipeline"]["gate_gauss"] = "high";
        CHECK_THROWS_AS(config_from_json(doc2), ConfigError);
    }

    SUBCASE("overrides") {
        nlohmann::json doc = nlohmann::json::object();
        apply_override(doc, "scenario.kind=custom");
        apply_override(doc, "pipeline.gate_gauss=0.5");
        apply_override(doc, "scenario.custom.duration_s=7.5");
        const RunConfig c = config_from_json(doc);
        CHECK(c.scenario.kind == Scenario::Kind::custom);
        CHECK(c.pipeline.solver.gate_gauss == doctest::Approx(0.5));
        CHECK(c.scenario.custom.duration_s == doctest::Approx(7.5));
        CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
    }
}

TEST_CASE("csv round trips") {
    const auto dir = temp_dir();

    SUBCASE("samples survive a write-read cycle exactly") {
        std::vector<SampleRow> rows;
        for (int k = 0; k < 100; ++k) {
            SampleRow r;
            r.mag.t = k / 200.0;
            r.mag.field = Vec3(0.1 * std::sin(k * 0.37), -0.05 * std::cos(k * 0.11), 1e-3 * k);
            r.nav = Attitude{1e-4 * k, -2e-4 * k, 3e-4 * k};
            rows.push_back(r);
        }
        const auto path = (dir / "samples.csv").string();
        write_samples_csv(path, rows);
        const auto back = read_samples_csv(path);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(back[i].mag.t == rows[i].mag.t);
            CHECK(back[i].mag.field == rows[i].mag.field);
            CHECK(back[i].nav.yaw_rad == rows[i].nav.yaw_rad);
        }
    }

    SUBCASE("estimates keep nine significant digits") {
        std::vector<PoseEstimate> estimates;
        PoseEstimate e;
        e.t = 12.345678912345;
        e.r = Vec3(0.123456789123, -0.98765432198, 0.5);
        e.beacon_yaw = 0.52359877559;
        e.residual_norm = 1.23456789e-4;
        e.flag = EstimateFlag::smoothed;
        estimates.push_back(e);
        const auto path = (dir / "estimates.csv").string();
        write_estimates_csv(path, estimates);
        const auto back = read_estimates_csv(path);
        REQUIRE(back.size() == 1);
        CHECK(back[0].t == doctest::Approx(e.t).epsilon(1e-9));
        CHECK(back[0].r.x() == doctest::Approx(e.r.x()).epsilon(1e-9));
        CHECK(back[0].r.y() == doctest::Approx(e.r.y()).epsilon(1e-9));
        CHECK(back[0].flag == EstimateFlag::smoothed);
    }

    SUBCASE("malformed rows are reported with their row number") {
        const auto path = (dir / "broken.csv").string();
        std::ofstream out(path);
        out << "t_s,phase_rad\n0.0,0.1\n0.005,banana\n";
        out.close();
        try {
            read_phase_csv(path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("row 3") != std::string::npos);
        }
    }

    SUBCASE("wrong header is rejected") {
        const auto path = (dir / "wrong_header.csv").string();
        std::ofstream out(path);
        out << "time,phase\n0.0,0.1\n";
        out.close();
        CHECK_THROWS_AS(read_phase_csv(path), ConfigError);
    }

    SUBCASE("sample spacing validation reports the gap row") {
        std::vector<SampleRow> rows;
        for (int k = 0; k < 10; ++k) {
            SampleRow r;
            r.mag.t = k / 200.0;
            rows.push_back(r);
        }
        CHECK_NOTHROW(validate_sample_spacing(rows, 200.0));
        rows[7].mag.t += 0.01; // tear a gap
        try {
            validate_sample_spacing(rows, 200.0);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("row") != std::string::npos);
        }
    }
}
