#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minisocial/baselines.hpp"
#include "minisocial/environment.hpp"

namespace minisocial {

struct MetricsOptions {
  std::string csv;  // output file name under the log dir; empty = stdout only
  bool table = true;

  bool operator==(const MetricsOptions&) const = default;
};

/// Experiment description. The first block mirrors the classic run-config
/// keys verbatim; the rest are extensions of this implementation.
struct RunConfig {
  std::vector<std::pair<std::int64_t, int>> num_agents{{0, 3}, {35, 4}, {70, 5}};
  std::vector<int> eval_num_agents{3, 4, 5, 7, 10};
  std::int64_t train_length = 250000;  // learner agent steps
  int ending_eval_trials = 25;
  std::int64_t eval_frequency = 0;     // agent steps between intermediate evals, 0 = off
  int intermediate_eval_trials = -1;   // -1 = ending_eval_trials
  bool policy_algo_sb3_contrib = false;
  std::string policy_algo_name = "PPO";
  std::string policy_name = "MlpPolicy";
  json policy_algo_kwargs = json::object();
  bool monitor = false;
  std::vector<std::string> experiment_names{"envs_door"};
  std::string run_name = "door/ao";
  std::string run_type = "AO";
  std::string device = "cpu";
  bool other_velocities_obs = true;
  bool agent_velocity_obs = true;
  bool agent_velocity_ignore_theta = false;
  bool other_velocities_ignore_theta = false;
  bool other_poses_ignore_theta = false;
  bool agent_pose_ignore_theta = false;
  double entropy_constant_penalty = -100000.0;
  bool entropy_constant_penalty_only_not_finish = true;

  // extensions
  double dt = 0.1;
  std::uint64_t seed = 0;
  PlannerParams planner;
  SocialForceParams humans;
  KinodynamicConfig kinodynamics;
  MetricsOptions metrics;
  int max_steps = 3000;
  int stall_window = 100;
  double stall_delta = 0.5;
  bool terminate_on_collision = false;
  double zone_radius = 1.0;
  int max_neighbors = 9;
  bool other_agent_goal_dist_obs = false;
  std::optional<RewarderConfig> rewards;  // replaces the run_type terms
  LearnerConfig learner;
  std::vector<MiniGameParams> scenario_params;  // overrides per mini-game kind

  /// Directory relative scenario paths in experiment_names resolve against.
  std::filesystem::path base_dir;
  /// Accepted-but-ignored values found while parsing.
  std::vector<std::string> warnings;

  [[nodiscard]] json to_json() const;
  /// Throws ConfigError with the offending key path.
  static RunConfig from_json(const json& j);

  /// Learner settings with policy_algo_kwargs applied; ignored kwargs are
  /// reported through `warnings_out`.
  [[nodiscard]] LearnerConfig learner_config(std::vector<std::string>* warnings_out = nullptr) const;
  /// Throws ConfigError when a scenario cannot be resolved or loaded.
  [[nodiscard]] ScenarioSet scenarios() const;
  [[nodiscard]] EnvConfig env_config() const;
};

/// Throws ConfigError (also for unreadable or malformed files).
RunConfig load_run_config(const std::filesystem::path& path);

/// A mini-game name ("envs_door", "hallway", ...) or a scenario file path.
std::shared_ptr<const ScenarioSource> resolve_scenario(const std::string& name,
                                                       const std::filesystem::path& base_dir,
                                                       const std::vector<MiniGameParams>& overrides = {});

}  // namespace minisocial
