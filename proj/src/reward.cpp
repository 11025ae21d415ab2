#include "minisocial/reward.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace minisocial {

std::string_view to_string(RewardKind k) {
  switch (k) {
    case RewardKind::Existence: return "existence";
    case RewardKind::Success: return "success";
    case RewardKind::Collision: return "collision";
    case RewardKind::Progress: return "progress";
    case RewardKind::Stall: return "stall";
    case RewardKind::Proximity: return "proximity";
    case RewardKind::SubGoal: return "subgoal";
  }
  return "";
}

RewardKind reward_kind_from_string(std::string_view s) {
  for (auto k : {RewardKind::Existence, RewardKind::Success, RewardKind::Collision, RewardKind::Progress,
                 RewardKind::Stall, RewardKind::Proximity, RewardKind::SubGoal}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown reward term '" + std::string(s) + "'");
}

void RewarderConfig::validate() const {
  for (const auto& t : terms) {
    if (t.schedule_duration && *t.schedule_duration <= 0) {
      throw std::invalid_argument("reward term '" + std::string(to_string(t.kind)) + "': duration must be > 0");
    }
  }
}

bool RewarderConfig::has(RewardKind k) const {
  return std::any_of(terms.begin(), terms.end(), [k](const auto& t) { return t.kind == k; });
}

RewarderConfig default_rewarder_config() {
  RewarderConfig cfg;
  cfg.terms = {
      {RewardKind::Existence, -1.0},
      {RewardKind::Success, 100.0},
      {RewardKind::Collision, -10.0},
      {RewardKind::Progress, 1.0},
      {RewardKind::Stall, -100000.0},
  };
  return cfg;
}

double RewardBreakdown::term(std::string_view name) const {
  for (const auto& [k, v] : terms) {
    if (k == name) return v;
  }
  return 0.0;
}

double min_surface_distance(int agent_id, const WorldSnapshot& world) {
  const AgentView* self = world.find_agent(agent_id);
  if (!self) throw std::invalid_argument("unknown agent " + std::to_string(agent_id));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : world.agents) {
    if (a.id == agent_id) continue;
    best = std::min(best, distance(self->state.pose.position(), a.state.pose.position()) - self->radius - a.radius);
  }
  return best;
}

RewardBreakdown reward(int agent_id, const WorldSnapshot& prev, const WorldSnapshot& next,
                       const RewardEvents& events, const RewarderConfig& cfg, std::int64_t global_step) {
  const AgentView* before = prev.find_agent(agent_id);
  const AgentView* after = next.find_agent(agent_id);
  if (!before || !after) throw std::invalid_argument("reward: unknown agent " + std::to_string(agent_id));

  RewardBreakdown out;
  for (const auto& t : cfg.terms) {
    double base = 0.0;
    switch (t.kind) {
      case RewardKind::Existence:
        base = before->succeeded ? 0.0 : 1.0;
        break;
      case RewardKind::Success:
        base = (!before->succeeded && after->succeeded) ? 1.0 : 0.0;
        break;
      case RewardKind::Collision:
        base = events.collided ? 1.0 : 0.0;
        break;
      case RewardKind::Progress:
        base = before->state.d_goal - after->state.d_goal;
        break;
      case RewardKind::Stall:
        base = (events.stall_terminated && (!t.only_unfinished || !after->succeeded)) ? 1.0 : 0.0;
        break;
      case RewardKind::Proximity: {
        const double d = min_surface_distance(agent_id, next);
        base = d < t.threshold ? t.threshold - d : 0.0;
        break;
      }
      case RewardKind::SubGoal:
        base = events.zone_passed ? 1.0 : 0.0;
        break;
    }
    double scale = 1.0;
    if (t.schedule_duration) {
      scale = std::min(1.0, static_cast<double>(global_step) / static_cast<double>(*t.schedule_duration));
    }
    const double value = t.weight * base * scale;
    out.terms.emplace_back(std::string(to_string(t.kind)), value);
    out.total += value;
  }
  return out;
}

}  // namespace minisocial
