#pragma once

#include <array>
#include <optional>

#include "emloc/geometry.hpp"
#include "emloc/lia.hpp"

namespace emloc {

/// Six in/anti-phase flags, +1 in-phase and -1 anti-phase, in the fixed order
/// (coil1 x, coil1 y), (coil2 y, coil2 z), (coil3 x, coil3 z).
struct PhaseCombo {
    std::array<int, 6> flags{1, 1, 1, 1, 1, 1};

    bool operator==(const PhaseCombo&) const = default;
};

/// One of the eight octants around the beacon, numbered so that antipodal octants
/// form the pairs (1,7), (2,8), (3,5), (4,6).
struct Sector {
    int id = 0;
    std::array<int, 3> octant{0, 0, 0}; // signs of (x, y, z)

    bool operator==(const Sector&) const = default;
};

Sector sector_from_id(int id);

/// Octant of a position. Throws DegenerateError when a component is on a coil plane
/// (|component| < 1e-9), where the octant is undefined.
Sector sector_from_position(const Vec3& r);

/// The phase combination every position in the given sector produces.
PhaseCombo combo_for_sector(const Sector& sector);

/// The sector sharing the combo of `sector` (its antipode).
Sector ambiguous_partner(const Sector& sector);

/// Flags from settled lock-in phases: in-phase iff |phase| < pi/2. Returns nullopt
/// when any of the six tracked amplitudes is below the gate, where phase carries no
/// information (low confidence).
std::optional<PhaseCombo> classify_phase_combo(const LiaOutput& lia, double amp_gate_gauss = 0.03);

struct SectorResolution {
    Sector sector;
    bool low_confidence = false;
};

/// Picks between the two sectors sharing `combo`: the member whose octant differs
/// from the previous sector in at most one sign. A combo matching no table row
/// keeps the previous sector and reports low confidence.
SectorResolution resolve_sector(const PhaseCombo& combo, const Sector& prev);

} // namespace emloc
