#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "minisocial/conflict_zone.hpp"
#include "minisocial/dynamics.hpp"
#include "minisocial/episode_log.hpp"
#include "minisocial/human_sim.hpp"
#include "minisocial/json_util.hpp"
#include "minisocial/observation.hpp"
#include "minisocial/planner.hpp"
#include "minisocial/reward.hpp"
#include "minisocial/scenarios.hpp"
#include "minisocial/world.hpp"

namespace minisocial {

/// Caller broke the reset/step contract (bad action set, step after done).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct EnvConfig {
  ScenarioSet scenarios;
  /// (first episode index, k) pairs; indices strictly increasing from 0.
  std::vector<std::pair<std::int64_t, int>> num_agents{{0, 3}};
  int max_steps = 3000;
  double dt = 0.1;
  int stall_window = 100;
  double stall_delta = 0.5;
  bool terminate_on_collision = false;
  std::uint64_t seed = 0;

  KinodynamicConfig kinodynamics;
  PlannerParams planner;
  SocialForceParams humans;
  ObserverConfig observer;
  RewarderConfig rewarder = default_rewarder_config();

  OrderMode order_mode = OrderMode::None;
  double zone_radius = 1.0;

  /// Throws ConfigError.
  void validate() const;
  /// k for an episode index under the schedule.
  [[nodiscard]] int agents_for_episode(std::int64_t episode_index) const;
  /// Everything that shapes an episode, as JSON (scenario ids stand in for the set).
  [[nodiscard]] json to_json() const;
  /// FNV-1a of to_json(), as 16 hex digits.
  [[nodiscard]] std::string hash() const;
};

struct StepInfo {
  bool collision = false;
  bool success = false;
  double d_goal = 0.0;
};

struct AgentStepResult {
  int id = 0;
  ObservationFrame observation;
  RewardBreakdown reward;
  bool terminated = false;
  StepInfo info;
};

struct StepResult {
  std::vector<AgentStepResult> agents;  // ascending id, live agents only
  bool done = false;
  std::string reason;  // set when done
};

class Environment {
 public:
  /// Throws ConfigError on an invalid config.
  explicit Environment(EnvConfig config);

  /// Start episode `episode_index`; returns one frame per agent, by id.
  /// Throws ConfigError when no scenario supports the scheduled k.
  std::vector<ObservationFrame> reset(std::int64_t episode_index);

  /// Actions for exactly the live agents, in any order. Throws ContractError.
  StepResult step(const std::vector<std::pair<int, Action>>& actions);

  /// Abort the running episode (e.g. the controller went away).
  void abort(const std::string& reason);

  [[nodiscard]] const EnvConfig& config() const { return cfg_; }
  [[nodiscard]] WorldSnapshot snapshot() const;
  [[nodiscard]] std::vector<int> live_agents() const;
  [[nodiscard]] bool done() const { return done_; }
  [[nodiscard]] int num_agents() const { return static_cast<int>(agents_.size()); }
  [[nodiscard]] int step_count() const { return t_; }
  [[nodiscard]] const EpisodeLog& log() const { return log_; }
  void set_policy_name(std::string name) { policy_name_ = std::move(name); }
  [[nodiscard]] const ScenarioSource& scenario() const { return *source_; }
  [[nodiscard]] const std::vector<Route>& routes() const { return routes_; }
  [[nodiscard]] const std::optional<ConflictZone>& zone() const { return zone_; }
  [[nodiscard]] const std::vector<int>& enforced_order() const { return assigned_rank_; }

  /// Reward schedules ramp with this counter (environment steps across episodes).
  [[nodiscard]] std::int64_t global_step() const { return global_step_; }
  void set_global_step(std::int64_t s) { global_step_ = s; }

  /// Override an initial pose after reset (tests); recomputes waypoints
  /// starting from `route_progress`.
  void place_agent(int id, const Pose& pose, std::size_t route_progress = 0);

  [[nodiscard]] int observation_size() const { return minisocial::observation_size(cfg_.observer); }

 private:
  struct Agent {
    AgentState state;
    bool succeeded = false;
    bool colliding = false;
  };
  struct Human {
    HumanState state;
    Route route;
    std::size_t target = 0;
  };

  [[nodiscard]] std::vector<Disc> obstacles_for(std::size_t self) const;
  [[nodiscard]] std::vector<ObservationFrame> observe_all(const WorldSnapshot& world) const;
  void refresh_waypoint(Agent& a, std::size_t id);
  void record_positions();
  [[nodiscard]] bool stalled() const;

  EnvConfig cfg_;
  std::string config_hash_;
  std::string policy_name_;
  const ScenarioSource* source_ = nullptr;
  std::vector<Route> routes_;
  std::vector<Agent> agents_;
  std::vector<Human> humans_;
  std::optional<ConflictZone> zone_;
  std::vector<int> assigned_rank_;
  std::deque<std::vector<Vec2>> history_;
  EpisodeLog log_;
  int t_ = 0;
  bool done_ = true;
  std::int64_t global_step_ = 0;
};

/// True iff the summed path length of every agent over the history frames
/// is below delta. Frames are per-step position lists (all the same width).
bool detect_stall(const std::deque<std::vector<Vec2>>& history, double delta);

}  // namespace minisocial
