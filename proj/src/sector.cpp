#include "emloc/sector.hpp"

#include <cmath>

#include "emloc/errors.hpp"

namespace emloc {

namespace {

// Octant signs by sector id. Sectors 1-4 circle the upper half (z > 0), 5-8 mirror
// them below, with 7 antipodal to 1.
constexpr std::array<std::array<int, 3>, 8> kOctants{{
    {+1, +1, +1}, // 1
    {+1, -1, +1}, // 2
    {-1, -1, +1}, // 3
    {-1, +1, +1}, // 4
    {+1, +1, -1}, // 5
    {+1, -1, -1}, // 6
    {-1, -1, -1}, // 7
    {-1, +1, -1}, // 8
}};

int hamming(const std::array<int, 3>& a, const std::array<int, 3>& b) {
    int d = 0;
    for (int i = 0; i < 3; ++i)
        d += a[i] != b[i];
    return d;
}

} // namespace

Sector sector_from_id(int id) {
    if (id < 1 || id > 8)
        throw DegenerateError("sector id must be in [1, 8]");
    return Sector{id, kOctants[id - 1]};
}

Sector sector_from_position(const Vec3& r) {
    std::array<int, 3> signs{};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(r[i]) < 1e-9)
            throw DegenerateError("position lies on a coil plane; octant undefined");
        signs[i] = r[i] > 0 ? 1 : -1;
    }
    for (int id = 1; id <= 8; ++id) {
        if (kOctants[id - 1] == signs)
            return Sector{id, signs};
    }
    throw DegenerateError("unreachable octant");
}

PhaseCombo combo_for_sector(const Sector& sector) {
    const int pxy = sector.octant[0] * sector.octant[1];
    const int pxz = sector.octant[0] * sector.octant[2];
    const int pyz = sector.octant[1] * sector.octant[2];
    // coil 1 (z axis) x/y components carry sign(zx), sign(zy); coil 2 (x axis)
    // y/z components sign(xy), sign(xz); coil 3 (y axis) x/z components
    // sign(yx), sign(yz).
    return PhaseCombo{{pxz, pyz, pxy, pxz, pxy, pyz}};
}

Sector ambiguous_partner(const Sector& sector) {
    const std::array<int, 3> neg{-sector.octant[0], -sector.octant[1], -sector.octant[2]};
    for (int id = 1; id <= 8; ++id) {
        if (kOctants[id - 1] == neg)
            return Sector{id, neg};
    }
    throw DegenerateError("unreachable octant");
}

std::optional<PhaseCombo> classify_phase_combo(const LiaOutput& lia, double amp_gate_gauss) {
    // tracked components: (coil, axis) pairs per the combo layout
    constexpr std::array<std::pair<int, int>, 6> comps{{{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 0}, {2, 2}}};
    PhaseCombo combo;
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const auto [coil, axis] = comps[k];
        if (lia.amp[coil][axis] < amp_gate_gauss)
            return std::nullopt;
        combo.flags[k] = std::abs(lia.phase[coil][axis]) < M_PI / 2.0 ? 1 : -1;
    }
    return combo;
}

SectorResolution resolve_sector(const PhaseCombo& combo, const Sector& prev) {
    for (int row = 1; row <= 4; ++row) {
        const Sector a = sector_from_id(row);
        if (!(combo == combo_for_sector(a)))
            continue;
        const Sector b = ambiguous_partner(a);
        if (hamming(prev.octant, a.octant) <= 1)
            return {a, false};
        return {b, false};
    }
    return {prev, true};
}

} // namespace emloc
