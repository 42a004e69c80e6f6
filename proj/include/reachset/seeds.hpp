#pragma once

#include <vector>

#include "reachset/families.hpp"
#include "reachset/pmp.hpp"

namespace reachset {

/// Terminal costates suggested by the switching geometry of a family member.
/// Planar members get p parallel to the S line or to the chord between arc
/// junctions (both orientations); 3D planar members lift the planar costate,
/// twisted CSC uses p_r = S direction, H uses the closed-form costate of the
/// helicoidal extremal. Entries are not normalized.
std::vector<StateVec> costate_seeds(const Candidate& c, const CandidateGrid& g, bool spatial,
                                    bool directed, const Config3& base = {});

/// Constant position costate of the helicoidal extremal launched from frame
/// f0 with |q(0)| = 1 (unit-curvature units).
Vec3 helix_position_costate(const HParams& h, const Frame3& f0);

}  // namespace reachset
