#pragma once

#include <vector>

#include "minisocial/dynamics.hpp"

namespace minisocial {

struct AgentView {
  int id = 0;
  AgentState state;
  double radius = 0.3;
  double v_pref = 1.0;
  bool succeeded = false;
  bool colliding = false;
};

struct HumanView {
  int id = 0;  // entity id, numbered after the agents
  Vec2 position;
  Vec2 velocity;
  double radius = 0.25;
};

/// Read-only picture of every body at one instant.
struct WorldSnapshot {
  std::vector<AgentView> agents;
  std::vector<HumanView> humans;

  [[nodiscard]] const AgentView* find_agent(int id) const {
    for (const auto& a : agents) {
      if (a.id == id) return &a;
    }
    return nullptr;
  }
};

}  // namespace minisocial
