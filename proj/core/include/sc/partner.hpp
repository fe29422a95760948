#pragma once

#include <optional>
#include <vector>

#include "sc/billiard.hpp"

namespace sc::billiard {

// Sieber-Richter partner construction: an orbit with a small-angle
// self-crossing in position space is paired with the orbit that narrowly
// avoids the crossing, traversing one loop in reversed order.

struct EncounterGeometry {
  Vec2 section_point{};
  double crossing_angle = 0.0;   // angle between the stretch and the reversed partner stretch
  double s = 0.0;                // stable component
  double u = 0.0;                // unstable component
  double action_difference = 0.0;  // Delta S = s*u, by construction
  double t_enc = 0.0;            // (1/lambda) ln(c^2/|Delta S|)
  double cutoff_c = 0.1;
};

struct SelfCrossing {
  int chord_a = 0;  // crossing between chord a (bounce a -> a+1) and chord b
  int chord_b = 0;
  Vec2 point{};
  double angle = 0.0;  // angle between v_a and -v_b
};

std::vector<SelfCrossing> find_self_crossings(const PeriodicOrbit& orbit,
                                              double angle_threshold = 0.3);

struct PartnerResult {
  PeriodicOrbit partner;
  EncounterGeometry geometry;
  double delta_s_measured = 0.0;  // k (L_p - L_p') at k = 1
};

// Builds the reconnected code for one crossing (loop between the chords
// reversed), Newton-refines it, and reports the action difference both
// measured and predicted from the (s, u) decomposition at the crossing.
std::optional<PartnerResult> find_partner_orbit(const BilliardTable& table,
                                                const PeriodicOrbit& orbit, double lyapunov,
                                                double angle_threshold = 0.3,
                                                double cutoff_c = 0.1);

std::optional<PartnerResult> partner_for_crossing(const BilliardTable& table,
                                                  const PeriodicOrbit& orbit,
                                                  const SelfCrossing& crossing, double lyapunov,
                                                  double cutoff_c = 0.1);

// Stable/unstable directions of the orbit's monodromy at a Poincare section
// placed at `point` on chord `chord` (transverse coordinates (dq, dp), k=1).
// Normalized so e_u ^ e_s = 1 with equal Euclidean norms.
struct InvariantDirections {
  double eu_q = 0.0, eu_p = 0.0;
  double es_q = 0.0, es_p = 0.0;
};
std::optional<InvariantDirections> invariant_directions(const BilliardTable& table,
                                                        const PeriodicOrbit& orbit, int chord,
                                                        Vec2 point);

}  // namespace sc::billiard
