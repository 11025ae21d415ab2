#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "minisocial/geometry.hpp"
#include "minisocial/rng.hpp"

namespace minisocial {

enum class ZoneState { Outside, Inside, Passed };

enum class OrderMode { None, AnyOrder, EnforcedOrder };

std::string_view to_string(OrderMode m);
/// "none", "any_order", "enforced_order". Throws std::invalid_argument.
OrderMode order_mode_from_string(std::string_view s);

/// Region around the routes' common point. Each agent moves
/// outside -> inside -> passed and never back.
class ConflictZone {
 public:
  ConflictZone() = default;
  /// Throws std::invalid_argument when radius <= 0.
  ConflictZone(Vec2 center, double radius, int num_agents);

  /// Feed positions after a step (indexed by agent id). Returns the ids that
  /// completed the zone this step, ascending, which is also their rank order.
  std::vector<int> update(std::span<const Vec2> positions);

  [[nodiscard]] ZoneState state(int agent) const { return states_.at(static_cast<std::size_t>(agent)); }
  /// 1-based completion rank, 0 while not passed.
  [[nodiscard]] int rank(int agent) const { return ranks_.at(static_cast<std::size_t>(agent)); }
  [[nodiscard]] Vec2 center() const { return center_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] int passed_count() const { return passed_; }

 private:
  Vec2 center_;
  double radius_ = 1.0;
  std::vector<ZoneState> states_;
  std::vector<int> ranks_;
  int passed_ = 0;
};

/// Random but fixed completion order: assigned[i] is agent i's 1-based rank.
std::vector<int> draw_enforced_order(int num_agents, CounterRng& rng);

/// Whether an agent that just completed the zone with `completion_rank`
/// earns the pass reward. `assigned_rank` is ignored for AnyOrder.
bool order_reward_earned(OrderMode mode, int completion_rank, int assigned_rank);

/// The order reward for one completion: r_pass when earned, else 0.
double order_reward(OrderMode mode, int completion_rank, int assigned_rank, double r_pass = 25.0);

}  // namespace minisocial
