#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "minisocial/dynamics.hpp"
#include "minisocial/planner.hpp"

namespace minisocial {

struct LogAgentInit {
  int id = 0;
  Pose pose;
  double radius = 0.3;
  std::vector<NodeId> route;
  bool operator==(const LogAgentInit&) const = default;
};

struct LogAgentStep {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double v = 0.0;                 // speed, m/s
  std::optional<Action> action;   // empty once the agent has finished
  double reward = 0.0;
  std::vector<int> coll;          // colliders: agent ids, -1 for a wall, humans by entity id
  bool succ = false;              // reached its goal at or before this step
  bool operator==(const LogAgentStep&) const = default;
};

struct LogHumanStep {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  bool operator==(const LogHumanStep&) const = default;
};

struct LogStep {
  int t = 0;
  std::vector<LogAgentStep> agents;
  std::vector<LogHumanStep> humans;
  bool operator==(const LogStep&) const = default;
};

/// One episode: a header line, one line per step (record t holds the state
/// after the (t+1)-th transition), and a footer line.
struct EpisodeLog {
  std::string scenario;
  std::string policy;
  int k = 0;
  std::uint64_t seed = 0;
  std::int64_t episode = 0;
  std::string config_hash;
  double dt = 0.1;
  int max_steps = 0;
  std::vector<LogAgentInit> init;

  std::vector<LogStep> steps;

  std::string reason;  // success, collision, stall, max_steps, disconnect
  int length = 0;

  bool operator==(const EpisodeLog&) const = default;

  [[nodiscard]] bool finished() const { return !reason.empty(); }
  [[nodiscard]] std::string header_line() const;
  [[nodiscard]] static std::string step_line(const LogStep& s);
  [[nodiscard]] std::string footer_line() const;
  [[nodiscard]] std::string to_jsonl() const;
};

/// Throws std::runtime_error naming the bad line. A missing footer is
/// accepted (truncated log) and leaves `reason` empty.
EpisodeLog parse_episode_log(const std::string& text);
EpisodeLog load_episode_log(const std::filesystem::path& path);
/// Several episodes concatenated in one file.
std::vector<EpisodeLog> parse_episode_logs(const std::string& text);

}  // namespace minisocial
