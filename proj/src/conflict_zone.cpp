#include "minisocial/conflict_zone.hpp"

#include <stdexcept>

namespace minisocial {

std::string_view to_string(OrderMode m) {
  switch (m) {
    case OrderMode::None: return "none";
    case OrderMode::AnyOrder: return "any_order";
    case OrderMode::EnforcedOrder: return "enforced_order";
  }
  return "";
}

OrderMode order_mode_from_string(std::string_view s) {
  for (auto m : {OrderMode::None, OrderMode::AnyOrder, OrderMode::EnforcedOrder}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown order mode '" + std::string(s) + "'");
}

ConflictZone::ConflictZone(Vec2 center, double radius, int num_agents)
    : center_(center), radius_(radius), states_(static_cast<std::size_t>(num_agents), ZoneState::Outside),
      ranks_(static_cast<std::size_t>(num_agents), 0) {
  if (!(radius > 0.0)) throw std::invalid_argument("conflict zone radius must be > 0");
}

std::vector<int> ConflictZone::update(std::span<const Vec2> positions) {
  if (positions.size() != states_.size()) throw std::invalid_argument("conflict zone: wrong agent count");
  std::vector<int> done;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const bool in = distance(positions[i], center_) < radius_;
    switch (states_[i]) {
      case ZoneState::Outside:
        if (in) states_[i] = ZoneState::Inside;
        break;
      case ZoneState::Inside:
        if (!in) {
          states_[i] = ZoneState::Passed;
          ranks_[i] = ++passed_;
          done.push_back(static_cast<int>(i));
        }
        break;
      case ZoneState::Passed:
        break;
    }
  }
  return done;
}

std::vector<int> draw_enforced_order(int num_agents, CounterRng& rng) {
  std::vector<int> ranks(static_cast<std::size_t>(num_agents));
  for (int i = 0; i < num_agents; ++i) ranks[static_cast<std::size_t>(i)] = i + 1;
  rng.shuffle(std::span<int>(ranks));
  return ranks;
}

bool order_reward_earned(OrderMode mode, int completion_rank, int assigned_rank) {
  switch (mode) {
    case OrderMode::None: return false;
    case OrderMode::AnyOrder: return completion_rank > 0;
    case OrderMode::EnforcedOrder: return completion_rank > 0 && completion_rank == assigned_rank;
  }
  return false;
}

double order_reward(OrderMode mode, int completion_rank, int assigned_rank, double r_pass) {
  return order_reward_earned(mode, completion_rank, assigned_rank) ? r_pass : 0.0;
}

}  // namespace minisocial
