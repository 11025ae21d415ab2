#include "minisocial/human_sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace minisocial {

void SocialForceParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("humans.") + name + " must be > 0");
  };
  positive(tau, "tau");
  positive(agent_range, "B");
  positive(wall_range, "B_w");
  positive(v_pref, "v_pref");
  positive(radius, "radius");
  positive(speed_cap_factor, "speed_cap_factor");
  if (agent_strength < 0.0 || wall_strength < 0.0) throw std::invalid_argument("humans: strengths must be >= 0");
}

Vec2 social_force(const HumanState& h, std::span<const Neighbor> neighbors, std::span<const Segment> walls,
                  const SocialForceParams& p) {
  Vec2 force;
  const Vec2 to_goal = h.goal - h.position;
  const double goal_dist = to_goal.norm();
  const Vec2 desired = goal_dist > 0.0 ? to_goal * (h.v_pref / goal_dist) : Vec2{};
  force += (desired - h.velocity) / p.tau;

  for (const auto& n : neighbors) {
    const Vec2 diff = h.position - n.position;
    const double d = diff.norm();
    if (d <= 0.0) continue;  // coincident bodies have no defined direction
    const double mag = p.agent_strength * std::exp((h.radius + n.radius - d) / p.agent_range);
    force += diff * (mag / d);
  }

  for (const auto& w : walls) {
    const Vec2 diff = h.position - closest_point_on_segment(h.position, w);
    const double d = diff.norm();
    if (d <= 0.0) continue;
    const double mag = p.wall_strength * std::exp((h.radius - d) / p.wall_range);
    force += diff * (mag / d);
  }
  return force;
}

std::vector<HumanState> step_humans(std::span<const HumanState> humans, std::span<const Neighbor> robots,
                                    std::span<const Segment> walls, const SocialForceParams& p, double dt) {
  std::vector<HumanState> next(humans.begin(), humans.end());
  std::vector<Neighbor> neighbors;
  for (std::size_t i = 0; i < humans.size(); ++i) {
    const HumanState& h = humans[i];
    if (distance(h.position, h.goal) < p.goal_hold_radius) {
      next[i].velocity = {};
      continue;
    }
    neighbors.clear();
    for (std::size_t j = 0; j < humans.size(); ++j) {
      if (j != i) neighbors.push_back({humans[j].position, humans[j].velocity, humans[j].radius});
    }
    neighbors.insert(neighbors.end(), robots.begin(), robots.end());
    const Vec2 f = social_force(h, neighbors, walls, p);
    Vec2 v = h.velocity + f * dt;
    const double cap = p.speed_cap_factor * h.v_pref;
    const double speed = v.norm();
    if (speed > cap) v = v * (cap / speed);
    next[i].velocity = v;
    next[i].position = h.position + v * dt;
  }
  return next;
}

}  // namespace minisocial
