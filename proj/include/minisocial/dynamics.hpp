#pragma once

#include <string>
#include <string_view>

#include "minisocial/geometry.hpp"

namespace minisocial {

enum class DriveType { DiffDrive, Omni, Ackermann };

std::string_view to_string(DriveType d);
/// Throws std::invalid_argument for unknown names.
DriveType drive_type_from_string(std::string_view s);

struct KinodynamicConfig {
  DriveType drive_type = DriveType::DiffDrive;
  double v_max = 2.0;      // m/s
  double v_pref = 1.0;     // m/s
  double a_max = 2.0;      // m/s^2
  double omega_max = 2.0;  // rad/s
  double alpha_max = 4.0;  // rad/s^2
  double radius = 0.3;     // m
  double wheelbase = 0.5;  // m, Ackermann only
  double max_steer = 0.5;  // rad, Ackermann only

  bool operator==(const KinodynamicConfig&) const = default;

  /// Throws std::invalid_argument when a limit is non-positive or v_pref > v_max.
  void validate() const;

  /// Largest |omega| allowed at forward speed v (Ackermann curvature bound).
  [[nodiscard]] double omega_limit_at(double v) const;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;  // heading, (-pi, pi]

  [[nodiscard]] Vec2 position() const { return {x, y}; }
  bool operator==(const Pose&) const = default;
};

/// Per-agent state. `v` and `omega` are the last applied command, which the
/// acceleration limits are measured against.
struct AgentState {
  Pose pose;
  Vec2 vel;            // world-frame velocity
  double speed = 0.0;  // |vel|
  double v = 0.0;      // signed forward speed (DiffDrive/Ackermann)
  double omega = 0.0;  // yaw rate
  double d_goal = 0.0;
  std::size_t route_progress = 0;

  bool operator==(const AgentState&) const = default;
};

/// Forward speed + yaw rate for DiffDrive/Ackermann, a velocity vector for Omni.
struct MotionCommand {
  double v = 0.0;
  double omega = 0.0;
  Vec2 v_vec;

  bool operator==(const MotionCommand&) const = default;
};

/// Project `desired` onto the commands reachable from `state` within one dt.
MotionCommand clamp_command(const AgentState& state, const MotionCommand& desired,
                            const KinodynamicConfig& cfg, double dt);

/// Advance one step under an already-clamped command. Does not touch d_goal
/// or route_progress.
AgentState integrate(const AgentState& state, const MotionCommand& cmd, const KinodynamicConfig& cfg,
                     double dt);

/// The command that keeps the agent doing what it is doing now.
MotionCommand current_command(const AgentState& state, const KinodynamicConfig& cfg);

}  // namespace minisocial
