#include <doctest.h>

#include "emloc/errors.hpp"
#include "emloc/sector.hpp"

using namespace emloc;

namespace {

// Table rows in combo order ((1x,1y),(2y,2z),(3x,3z)): sector -> six flags.
PhaseCombo combo(std::array<int, 6> flags) { return PhaseCombo{flags}; }

LiaOutput lia_with_phases(const std::array<std::array<double, 3>, 3>& phases, double amp = 0.1) {
    LiaOutput out;
    for (int i = 0; i < 3; ++i) {
        out.amp[i] = Vec3::Constant(amp);
        out.phase[i] = Vec3(phases[i][0], phases[i][1], phases[i][2]);
    }
    out.ready = true;
    return out;
}

} // namespace

TEST_CASE("sector_from_position matches the direction table") {
    CHECK(sector_from_position(Vec3(0.3, 0.2, 0.5)).id == 1);
    CHECK(sector_from_position(Vec3(-0.3, -0.2, -0.5)).id == 7);
    CHECK(sector_from_position(Vec3(0.3, -0.2, 0.5)).id == 2);
    CHECK(sector_from_position(Vec3(-0.3, -0.2, 0.5)).id == 3);
    CHECK(sector_from_position(Vec3(-0.3, 0.2, 0.5)).id == 4);
    CHECK(sector_from_position(Vec3(0.3, 0.2, -0.5)).id == 5);
    CHECK(sector_from_position(Vec3(0.3, -0.2, -0.5)).id == 6);
    CHECK(sector_from_position(Vec3(-0.3, 0.2, -0.5)).id == 8);

    CHECK_THROWS_AS(sector_from_position(Vec3(0.0, 0.2, 0.5)), DegenerateError);
    CHECK_THROWS_AS(sector_from_position(Vec3(0.3, 1e-12, 0.5)), DegenerateError);
}

TEST_CASE("combo table rows") {
    CHECK(combo_for_sector(sector_from_id(1)) == combo({+1, +1, +1, +1, +1, +1}));
    CHECK(combo_for_sector(sector_from_id(2)) == combo({+1, -1, -1, +1, -1, -1}));
    CHECK(combo_for_sector(sector_from_id(3)) == combo({-1, -1, +1, -1, +1, -1}));
    CHECK(combo_for_sector(sector_from_id(4)) == combo({-1, +1, -1, -1, -1, +1}));
}

TEST_CASE("ambiguity pairs share combos") {
    const std::array<std::pair<int, int>, 4> pairs{{{1, 7}, {2, 8}, {3, 5}, {4, 6}}};
    for (const auto& [a, b] : pairs) {
        CHECK(combo_for_sector(sector_from_id(a)) == combo_for_sector(sector_from_id(b)));
        CHECK(ambiguous_partner(sector_from_id(a)).id == b);
        CHECK(ambiguous_partner(sector_from_id(b)).id == a);
    }
    // distinct rows never collide
    for (int a = 1; a <= 4; ++a)
        for (int b = a + 1; b <= 4; ++b)
            CHECK(!(combo_for_sector(sector_from_id(a)) == combo_for_sector(sector_from_id(b))));
}

TEST_CASE("classify_phase_combo") {
    SUBCASE("all in-phase") {
        const auto c = classify_phase_combo(lia_with_phases({{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}}));
        REQUIRE(c.has_value());
        CHECK(*c == combo({+1, +1, +1, +1, +1, +1}));
    }

    SUBCASE("sector 2/8 signature") {
        // coil1 (x,y) = (0, pi), coil2 (y,z) = (pi, 0), coil3 (x,z) = (pi, pi)
        const auto c = classify_phase_combo(
            lia_with_phases({{{0, M_PI, 0}, {0, M_PI, 0}, {M_PI, 0, M_PI}}}));
        REQUIRE(c.has_value());
        CHECK(*c == combo({+1, -1, -1, +1, -1, -1}));
        CHECK(*c == combo_for_sector(sector_from_id(2)));
    }

    SUBCASE("weak amplitude yields low confidence") {
        auto lia = lia_with_phases({{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}}, 0.01);
        CHECK(!classify_phase_combo(lia).has_value());
    }
}

TEST_CASE("resolve_sector adjacency rules") {
    const PhaseCombo row1 = combo_for_sector(sector_from_id(1));
    const PhaseCombo row2 = combo_for_sector(sector_from_id(2));

    CHECK(resolve_sector(row1, sector_from_id(2)).sector.id == 1);
    CHECK(resolve_sector(row1, sector_from_id(8)).sector.id == 7);
    CHECK(resolve_sector(row2, sector_from_id(5)).sector.id == 8);

    // each combo row partitions all eight previous sectors between its two members
    for (int row = 1; row <= 4; ++row) {
        const Sector a = sector_from_id(row);
        const Sector b = ambiguous_partner(a);
        const PhaseCombo c = combo_for_sector(a);
        for (int prev = 1; prev <= 8; ++prev) {
            const auto res = resolve_sector(c, sector_from_id(prev));
            CHECK(!res.low_confidence);
            CHECK((res.sector.id == a.id || res.sector.id == b.id));
        }
    }
}

TEST_CASE("resolve_sector holds on an invalid combo") {
    const PhaseCombo junk = combo({+1, +1, -1, +1, +1, +1}); // matches no table row
    const auto res = resolve_sector(junk, sector_from_id(3));
    CHECK(res.low_confidence);
    CHECK(res.sector.id == 3);
}

TEST_CASE("resolution is deterministic over a replayed walk") {
    // scripted walk 1 -> 2 -> 6 -> 5 -> 1 through single-sign transitions
    const std::array<int, 5> walk{1, 2, 6, 5, 1};
    const auto run = [&] {
        std::vector<int> seq;
        Sector prev = sector_from_id(walk[0]);
        for (std::size_t i = 1; i < walk.size(); ++i) {
            const auto res = resolve_sector(combo_for_sector(sector_from_id(walk[i])), prev);
            seq.push_back(res.sector.id);
            prev = res.sector;
        }
        return seq;
    };
    const auto a = run();
    const auto b = run();
    CHECK(a == b);
    CHECK(a == std::vector<int>{2, 6, 5, 1});
}
