#pragma once

#include <span>
#include <string>
#include <vector>

#include "minisocial/episode_log.hpp"

namespace minisocial {

inline constexpr double kStopSpeed = 0.05;  // m/s

struct MetricsRow {
  std::string scenario;
  std::string policy;
  int k = 0;
  int trials = 0;
  double success = 0.0;          // % of episodes where every agent succeeded
  double partial_success = 0.0;  // mean % of agents succeeding
  double avg_length = 0.0;       // steps
  double coll_rate = 0.0;        // collision events per episode
  double stop_time = 0.0;        // steps below kStopSpeed before success, mean over agents
  double max_dv = 0.0;           // cm/s per step

  bool operator==(const MetricsRow&) const = default;
};

/// Throws std::invalid_argument on an empty list. Scenario, policy and k come
/// from the first log.
MetricsRow compute_metrics(std::span<const EpisodeLog> logs);

/// Collision events in one episode: maximal runs of consecutive steps during
/// which a pair (two agents, or an agent and a wall or human) is in contact.
int collision_events(const EpisodeLog& log);

inline constexpr const char* kMetricsCsvHeader =
    "scenario,policy,k,trials,success,partial_success,avg_length,coll_rate,stop_time,max_dv";

std::string metrics_csv(std::span<const MetricsRow> rows);
/// Throws std::runtime_error naming the bad line.
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);
/// Column-aligned text, two decimals.
std::string metrics_table(std::span<const MetricsRow> rows);

}  // namespace minisocial
