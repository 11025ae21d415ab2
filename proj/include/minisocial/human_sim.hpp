#pragma once

#include <span>
#include <vector>

#include "minisocial/geometry.hpp"

namespace minisocial {

/// Social force model constants.
struct SocialForceParams {
  bool enabled = true;  // false drops scenario pedestrians
  double tau = 0.5;           // s, relaxation time toward the desired velocity
  double agent_strength = 2.1;  // A
  double agent_range = 0.3;     // B, m
  double wall_strength = 10.0;  // A_w
  double wall_range = 0.2;      // B_w, m
  double v_pref = 1.34;         // m/s
  double radius = 0.25;         // m
  double speed_cap_factor = 1.3;
  double goal_hold_radius = 0.5;  // m

  bool operator==(const SocialForceParams&) const = default;
  void validate() const;
};

struct HumanState {
  Vec2 position;
  Vec2 velocity;
  Vec2 goal;
  double v_pref = 1.34;
  double radius = 0.25;

  bool operator==(const HumanState&) const = default;
};

/// A moving body a pedestrian reacts to (another pedestrian or a robot).
struct Neighbor {
  Vec2 position;
  Vec2 velocity;
  double radius = 0.0;
};

/// Goal attraction plus exponential repulsion from neighbours and walls (unit mass).
Vec2 social_force(const HumanState& h, std::span<const Neighbor> neighbors, std::span<const Segment> walls,
                  const SocialForceParams& params);

/// One semi-implicit Euler step for every pedestrian. Forces come from the
/// pre-step snapshot, so the result does not depend on list order. `robots`
/// are extra neighbours that do not move here.
std::vector<HumanState> step_humans(std::span<const HumanState> humans, std::span<const Neighbor> robots,
                                    std::span<const Segment> walls, const SocialForceParams& params, double dt);

}  // namespace minisocial
