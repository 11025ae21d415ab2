#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minisocial/world.hpp"

namespace minisocial {

enum class RewardKind { Existence, Success, Collision, Progress, Stall, Proximity, SubGoal };

std::string_view to_string(RewardKind k);
RewardKind reward_kind_from_string(std::string_view s);

/// One additive reward term. `weight` carries the sign: the stock
/// configuration uses existence -1, success +100, collision -10, progress 1,
/// stall -100000.
struct RewardTermConfig {
  RewardKind kind = RewardKind::Existence;
  double weight = 1.0;
  /// When set, the term ramps in linearly: weight * min(1, global_step / duration).
  std::optional<std::int64_t> schedule_duration;
  /// Proximity only: surface distance below which the penalty applies.
  double threshold = 0.2;
  /// Stall only: penalise just the agents that have not reached their goal.
  bool only_unfinished = true;

  bool operator==(const RewardTermConfig&) const = default;
};

struct RewarderConfig {
  std::vector<RewardTermConfig> terms;
  bool normalize = true;

  bool operator==(const RewarderConfig&) const = default;
  /// Throws std::invalid_argument for a non-positive schedule duration.
  void validate() const;
  [[nodiscard]] bool has(RewardKind k) const;
};

/// Existence, success, collision, progress and stall with the stock constants.
RewarderConfig default_rewarder_config();

/// Things that happened to one agent during a step and cannot be read off
/// the before/after snapshots.
struct RewardEvents {
  bool collided = false;
  bool stall_terminated = false;
  bool zone_passed = false;  // earned the conflict-zone (sub-goal) reward this step
};

struct RewardBreakdown {
  double total = 0.0;
  std::vector<std::pair<std::string, double>> terms;

  [[nodiscard]] double term(std::string_view name) const;
};

/// Smallest surface-to-surface distance from agent_id to any other agent.
double min_surface_distance(int agent_id, const WorldSnapshot& world);

/// Throws std::invalid_argument if agent_id is missing from either snapshot.
RewardBreakdown reward(int agent_id, const WorldSnapshot& prev, const WorldSnapshot& next,
                       const RewardEvents& events, const RewarderConfig& cfg, std::int64_t global_step);

}  // namespace minisocial
