#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "minisocial/dynamics.hpp"
#include "minisocial/geometry.hpp"

namespace minisocial {

enum class Action { Go, Stop };

std::string_view to_string(Action a);
/// Accepts "GO"/"STOP" (case-sensitive). Throws std::invalid_argument.
Action action_from_string(std::string_view s);

struct PlannerParams {
  int num_candidates = 21;
  double horizon = 1.0;  // seconds
  double w_align = 1.0;
  double w_clear = 0.5;
  double clearance_cap = 1.0;  // m, clearance above this earns no extra score
  double waypoint_radius = 0.5;
  double safety_margin = 0.05;

  bool operator==(const PlannerParams&) const = default;
  void validate() const;
  [[nodiscard]] int horizon_steps(double dt) const;
};

/// Another body the planner must keep clear of, frozen at its current position.
struct Disc {
  Vec2 center;
  double radius = 0.0;
};

struct CandidateTrajectory {
  MotionCommand command;
  std::vector<Pose> predicted_poses;
  double clearance = 0.0;  // smallest along the rollout
  double goal_alignment = 0.0;
  double score = 0.0;
  double tie_key = 0.0;  // |omega| (or |heading offset| for Omni); smaller wins ties
};

/// Constant-command rollouts toward `goal` at the speed reachable this step.
/// Candidates are ordered from the most clockwise to the most
/// counter-clockwise sample.
std::vector<CandidateTrajectory> sample_candidates(const AgentState& agent, Vec2 goal,
                                                   std::span<const Segment> walls, std::span<const Disc> others,
                                                   const KinodynamicConfig& cfg, const PlannerParams& params,
                                                   double dt);

bool is_blocked(const CandidateTrajectory& traj, double radius, double safety_margin);

/// Index of the selected candidate, or -1 when every candidate is blocked.
int select_candidate(std::span<const CandidateTrajectory> candidates, double radius, double safety_margin);

/// Maximal feasible deceleration toward rest.
MotionCommand stop_command(const AgentState& agent, const KinodynamicConfig& cfg, double dt);

MotionCommand plan_step(const AgentState& agent, Action action, const Route& route, const NavGraph& graph,
                        std::span<const Segment> walls, std::span<const Disc> others,
                        const KinodynamicConfig& cfg, const PlannerParams& params, double dt);

struct WaypointUpdate {
  std::size_t route_progress = 0;
  double d_goal = 0.0;
};

/// Remaining path length: current position to the target node, then along
/// the rest of the route.
double remaining_route_length(Vec2 position, const Route& route, std::size_t progress, const NavGraph& graph);

WaypointUpdate advance_waypoint(Vec2 position, std::size_t progress, const Route& route, const NavGraph& graph,
                                double waypoint_radius);

}  // namespace minisocial
