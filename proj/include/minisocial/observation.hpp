#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minisocial/world.hpp"

namespace minisocial {

enum class ObsComponent {
  AgentGoalDist,
  AgentsPose,
  OtherAgentObservables,
  OtherAgentGoalDist,
  CollisionObservation,
  SuccessObservation,
};

std::string_view to_string(ObsComponent c);
ObsComponent obs_component_from_string(std::string_view s);

/// Observation layout. Flag names follow the run-config keys.
struct ObserverConfig {
  std::vector<ObsComponent> components{ObsComponent::AgentGoalDist, ObsComponent::AgentsPose,
                                       ObsComponent::OtherAgentObservables, ObsComponent::CollisionObservation,
                                       ObsComponent::SuccessObservation};
  int max_neighbors = 9;  // K
  bool agent_pose_ignore_theta = false;
  bool agent_velocity_obs = true;
  bool agent_velocity_ignore_theta = false;
  bool other_poses_ignore_theta = false;
  bool other_velocities_obs = true;
  bool other_velocities_ignore_theta = false;

  bool operator==(const ObserverConfig&) const = default;
  void validate() const;

  [[nodiscard]] bool has(ObsComponent c) const;
  /// Adds or removes OtherAgentGoalDist (placed right after OtherAgentObservables).
  void set_other_goal_dist(bool enabled);
};

/// Named field with its values, in vector order within the component.
using NamedObservation = std::vector<std::pair<std::string, std::vector<double>>>;

struct ObservationFrame {
  std::vector<double> vector;
  NamedObservation named;

  [[nodiscard]] const std::vector<double>* field(std::string_view name) const;
};

/// (component, scalar count) in vector order.
std::vector<std::pair<std::string, int>> observation_layout(const ObserverConfig& cfg);
int observation_size(const ObserverConfig& cfg);

/// Scalars per neighbour slot in OtherAgentObservables.
int neighbor_slot_size(const ObserverConfig& cfg);

/// Entity ids of the K nearest other bodies (agents and humans), nearest
/// first, ties by id.
std::vector<int> nearest_neighbors(int agent_id, const WorldSnapshot& world, int k);

/// Throws std::invalid_argument if agent_id is not in the snapshot.
ObservationFrame observe(int agent_id, const WorldSnapshot& world, const ObserverConfig& cfg);

}  // namespace minisocial
