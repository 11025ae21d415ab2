#include "minisocial/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace minisocial {

std::string_view to_string(Action a) { return a == Action::Go ? "GO" : "STOP"; }

Action action_from_string(std::string_view s) {
  if (s == "GO") return Action::Go;
  if (s == "STOP") return Action::Stop;
  throw std::invalid_argument("unknown action '" + std::string(s) + "'");
}

void PlannerParams::validate() const {
  if (num_candidates < 1) throw std::invalid_argument("planner.num_candidates must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("planner.horizon must be > 0");
  if (!(waypoint_radius > 0.0)) throw std::invalid_argument("planner.waypoint_radius must be > 0");
  if (safety_margin < 0.0) throw std::invalid_argument("planner.safety_margin must be >= 0");
  if (clearance_cap <= 0.0) throw std::invalid_argument("planner.clearance_cap must be > 0");
}

int PlannerParams::horizon_steps(double dt) const {
  return std::max(1, static_cast<int>(std::lround(horizon / dt)));
}

namespace {

double clearance_at(Vec2 p, std::span<const Segment> walls, std::span<const Disc> others) {
  double c = distance_to_walls(p, walls);
  for (const auto& d : others) c = std::min(c, distance(p, d.center) - d.radius);
  return std::max(c, 0.0);
}

void score_candidate(CandidateTrajectory& c, Vec2 goal, std::span<const Segment> walls,
                     std::span<const Disc> others, const PlannerParams& params) {
  c.clearance = std::numeric_limits<double>::infinity();
  bool reaches_goal = false;
  for (const auto& pose : c.predicted_poses) {
    c.clearance = std::min(c.clearance, clearance_at(pose.position(), walls, others));
    if (distance(pose.position(), goal) < params.waypoint_radius) reaches_goal = true;
  }
  if (!std::isfinite(c.clearance)) c.clearance = params.clearance_cap;
  // A rollout that passes through the waypoint is as aligned as it can be;
  // measuring the bearing beyond it would penalise overshoot.
  if (reaches_goal) {
    c.goal_alignment = 1.0;
  } else {
    const Pose& end = c.predicted_poses.back();
    const Vec2 to_goal = goal - end.position();
    const double bearing = std::atan2(to_goal.y, to_goal.x);
    c.goal_alignment = std::cos(wrap_angle(bearing - end.psi));
  }
  c.score = params.w_align * c.goal_alignment + params.w_clear * std::min(c.clearance, params.clearance_cap);
}

// Hold one already-feasible command for the whole horizon.
std::vector<Pose> rollout(const AgentState& agent, const MotionCommand& cmd, const KinodynamicConfig& cfg,
                          int steps, double dt) {
  std::vector<Pose> poses;
  poses.reserve(static_cast<std::size_t>(steps));
  AgentState s = agent;
  for (int i = 0; i < steps; ++i) {
    s = integrate(s, cmd, cfg, dt);
    poses.push_back(s.pose);
  }
  return poses;
}

}  // namespace

std::vector<CandidateTrajectory> sample_candidates(const AgentState& agent, Vec2 goal,
                                                   std::span<const Segment> walls, std::span<const Disc> others,
                                                   const KinodynamicConfig& cfg, const PlannerParams& params,
                                                   double dt) {
  const int n = params.num_candidates;
  const int steps = params.horizon_steps(dt);
  std::vector<CandidateTrajectory> out;
  out.reserve(static_cast<std::size_t>(n));

  if (cfg.drive_type == DriveType::Omni) {
    const Vec2 to_goal = goal - agent.pose.position();
    const double bearing = std::atan2(to_goal.y, to_goal.x);
    for (int i = 0; i < n; ++i) {
      const double offset = n == 1 ? 0.0 : -std::numbers::pi / 2 + std::numbers::pi * i / (n - 1);
      const double dir = bearing + offset;
      MotionCommand desired{0.0, 0.0, Vec2{std::cos(dir), std::sin(dir)} * cfg.v_pref};
      CandidateTrajectory c;
      c.command = clamp_command(agent, desired, cfg, dt);
      c.predicted_poses = rollout(agent, c.command, cfg, steps, dt);
      c.tie_key = std::abs(offset);
      score_candidate(c, goal, walls, others, params);
      out.push_back(std::move(c));
    }
    return out;
  }

  // Forward speed: the reachable speed closest to v_pref.
  const MotionCommand speed_only = clamp_command(agent, {cfg.v_pref, agent.omega, {}}, cfg, dt);
  const double v = speed_only.v;
  const double dw = cfg.alpha_max * dt;
  double w_lo = std::max(agent.omega - dw, -cfg.omega_max);
  double w_hi = std::min(agent.omega + dw, cfg.omega_max);
  if (cfg.drive_type == DriveType::Ackermann) {
    const double curv = cfg.omega_limit_at(v);
    w_lo = std::clamp(w_lo, -curv, curv);
    w_hi = std::clamp(w_hi, -curv, curv);
  }
  for (int i = 0; i < n; ++i) {
    const double w = n == 1 ? 0.5 * (w_lo + w_hi) : w_lo + (w_hi - w_lo) * i / (n - 1);
    CandidateTrajectory c;
    c.command = clamp_command(agent, {v, w, {}}, cfg, dt);
    c.predicted_poses = rollout(agent, c.command, cfg, steps, dt);
    c.tie_key = std::abs(c.command.omega);
    score_candidate(c, goal, walls, others, params);
    out.push_back(std::move(c));
  }
  return out;
}

bool is_blocked(const CandidateTrajectory& traj, double radius, double safety_margin) {
  return traj.clearance < radius + safety_margin;
}

int select_candidate(std::span<const CandidateTrajectory> candidates, double radius, double safety_margin) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    const auto& c = candidates[static_cast<std::size_t>(i)];
    if (is_blocked(c, radius, safety_margin)) continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const auto& b = candidates[static_cast<std::size_t>(best)];
    // strict comparisons keep the earliest (most clockwise) sample on exact ties
    if (c.score > b.score || (c.score == b.score && c.tie_key < b.tie_key)) best = i;
  }
  return best;
}

MotionCommand stop_command(const AgentState& agent, const KinodynamicConfig& cfg, double dt) {
  return clamp_command(agent, MotionCommand{}, cfg, dt);
}

MotionCommand plan_step(const AgentState& agent, Action action, const Route& route, const NavGraph& graph,
                        std::span<const Segment> walls, std::span<const Disc> others,
                        const KinodynamicConfig& cfg, const PlannerParams& params, double dt) {
  if (action == Action::Stop || route.node_ids.empty()) return stop_command(agent, cfg, dt);
  const std::size_t target = std::min(agent.route_progress, route.node_ids.size() - 1);
  const Vec2 goal = graph.position(route.node_ids[target]);
  const auto candidates = sample_candidates(agent, goal, walls, others, cfg, params, dt);
  const int pick = select_candidate(candidates, cfg.radius, params.safety_margin);
  if (pick < 0) return stop_command(agent, cfg, dt);
  return clamp_command(agent, candidates[static_cast<std::size_t>(pick)].command, cfg, dt);
}

double remaining_route_length(Vec2 position, const Route& route, std::size_t progress, const NavGraph& graph) {
  if (route.node_ids.empty()) return 0.0;
  progress = std::min(progress, route.node_ids.size() - 1);
  double total = distance(position, graph.position(route.node_ids[progress]));
  for (std::size_t i = progress + 1; i < route.node_ids.size(); ++i) {
    total += distance(graph.position(route.node_ids[i - 1]), graph.position(route.node_ids[i]));
  }
  return total;
}

WaypointUpdate advance_waypoint(Vec2 position, std::size_t progress, const Route& route, const NavGraph& graph,
                                double waypoint_radius) {
  if (route.node_ids.empty()) return {0, 0.0};
  const std::size_t last = route.node_ids.size() - 1;
  progress = std::min(progress, last);
  while (progress < last && distance(position, graph.position(route.node_ids[progress])) < waypoint_radius) {
    ++progress;
  }
  return {progress, remaining_route_length(position, route, progress, graph)};
}

}  // namespace minisocial
