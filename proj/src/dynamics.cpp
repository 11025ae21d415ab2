#include "minisocial/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minisocial {

std::string_view to_string(DriveType d) {
  switch (d) {
    case DriveType::DiffDrive: return "DiffDrive";
    case DriveType::Omni: return "Omni";
    case DriveType::Ackermann: return "Ackermann";
  }
  return "DiffDrive";
}

DriveType drive_type_from_string(std::string_view s) {
  if (s == "DiffDrive") return DriveType::DiffDrive;
  if (s == "Omni") return DriveType::Omni;
  if (s == "Ackermann") return DriveType::Ackermann;
  throw std::invalid_argument("unknown drive_type '" + std::string(s) + "'");
}

void KinodynamicConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be > 0");
  };
  positive(v_max, "v_max");
  positive(v_pref, "v_pref");
  positive(a_max, "a_max");
  positive(omega_max, "omega_max");
  positive(alpha_max, "alpha_max");
  positive(radius, "radius");
  if (drive_type == DriveType::Ackermann) {
    positive(wheelbase, "wheelbase");
    positive(max_steer, "max_steer");
  }
  if (v_pref > v_max) throw std::invalid_argument("v_pref must not exceed v_max");
}

double KinodynamicConfig::omega_limit_at(double v) const {
  if (drive_type != DriveType::Ackermann) return omega_max;
  return std::min(omega_max, std::abs(v) * std::tan(max_steer) / wheelbase);
}

namespace {

// Clamp x into [prev - step, prev + step] ∩ [-limit, limit]. Targets within
// rounding of one step are reached exactly so repeated braking lands on zero.
double clamp_rate(double x, double prev, double step, double limit) {
  const double stepped = std::abs(x - prev) <= step * (1.0 + 1e-9) ? x : std::clamp(x, prev - step, prev + step);
  return std::clamp(stepped, -limit, limit);
}

}  // namespace

MotionCommand clamp_command(const AgentState& state, const MotionCommand& desired, const KinodynamicConfig& cfg,
                            double dt) {
  MotionCommand out;
  if (cfg.drive_type == DriveType::Omni) {
    const double dv = cfg.a_max * dt;
    out.v_vec.x = clamp_rate(desired.v_vec.x, state.vel.x, dv, cfg.v_max);
    out.v_vec.y = clamp_rate(desired.v_vec.y, state.vel.y, dv, cfg.v_max);
    return out;
  }

  out.v = clamp_rate(desired.v, state.v, cfg.a_max * dt, cfg.v_max);

  const double dw = cfg.alpha_max * dt;
  double lo = std::max(state.omega - dw, -cfg.omega_max);
  double hi = std::min(state.omega + dw, cfg.omega_max);
  if (cfg.drive_type == DriveType::Ackermann) {
    const double curv = cfg.omega_limit_at(out.v);
    if (hi < -curv) {
      lo = hi;  // steering cannot unwind fast enough; stay as close as the rate limit allows
    } else if (lo > curv) {
      hi = lo;
    } else {
      lo = std::max(lo, -curv);
      hi = std::min(hi, curv);
    }
  }
  out.omega = std::clamp(desired.omega, lo, hi);
  return out;
}

AgentState integrate(const AgentState& state, const MotionCommand& cmd, const KinodynamicConfig& cfg, double dt) {
  AgentState next = state;
  if (cfg.drive_type == DriveType::Omni) {
    next.pose.x += cmd.v_vec.x * dt;
    next.pose.y += cmd.v_vec.y * dt;
    next.vel = cmd.v_vec;
    next.speed = cmd.v_vec.norm();
    if (next.speed > 1e-3) next.pose.psi = std::atan2(cmd.v_vec.y, cmd.v_vec.x);
    next.v = next.speed;
    next.omega = 0.0;
    return next;
  }

  const double psi_mid = state.pose.psi + 0.5 * cmd.omega * dt;
  next.pose.x += cmd.v * dt * std::cos(psi_mid);
  next.pose.y += cmd.v * dt * std::sin(psi_mid);
  next.pose.psi = wrap_angle(state.pose.psi + cmd.omega * dt);
  next.v = cmd.v;
  next.omega = cmd.omega;
  next.vel = {cmd.v * std::cos(next.pose.psi), cmd.v * std::sin(next.pose.psi)};
  next.speed = std::abs(cmd.v);
  return next;
}

MotionCommand current_command(const AgentState& state, const KinodynamicConfig& cfg) {
  if (cfg.drive_type == DriveType::Omni) return {0.0, 0.0, state.vel};
  return {state.v, state.omega, {}};
}

}  // namespace minisocial
