#include "minisocial/observation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace minisocial {

std::string_view to_string(ObsComponent c) {
  switch (c) {
    case ObsComponent::AgentGoalDist: return "AgentGoalDist";
    case ObsComponent::AgentsPose: return "AgentsPose";
    case ObsComponent::OtherAgentObservables: return "OtherAgentObservables";
    case ObsComponent::OtherAgentGoalDist: return "OtherAgentGoalDist";
    case ObsComponent::CollisionObservation: return "CollisionObservation";
    case ObsComponent::SuccessObservation: return "SuccessObservation";
  }
  return "";
}

ObsComponent obs_component_from_string(std::string_view s) {
  for (auto c : {ObsComponent::AgentGoalDist, ObsComponent::AgentsPose, ObsComponent::OtherAgentObservables,
                 ObsComponent::OtherAgentGoalDist, ObsComponent::CollisionObservation,
                 ObsComponent::SuccessObservation}) {
    if (to_string(c) == s) return c;
  }
  throw std::invalid_argument("unknown observation component '" + std::string(s) + "'");
}

void ObserverConfig::validate() const {
  if (max_neighbors < 0) throw std::invalid_argument("observer K must be >= 0");
  if (components.empty()) throw std::invalid_argument("observer needs at least one component");
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      if (components[i] == components[j]) {
        throw std::invalid_argument("duplicate observation component " + std::string(to_string(components[i])));
      }
    }
  }
}

bool ObserverConfig::has(ObsComponent c) const {
  return std::find(components.begin(), components.end(), c) != components.end();
}

void ObserverConfig::set_other_goal_dist(bool enabled) {
  auto it = std::find(components.begin(), components.end(), ObsComponent::OtherAgentGoalDist);
  if (!enabled) {
    if (it != components.end()) components.erase(it);
    return;
  }
  if (it != components.end()) return;
  auto anchor = std::find(components.begin(), components.end(), ObsComponent::OtherAgentObservables);
  components.insert(anchor == components.end() ? components.end() : anchor + 1, ObsComponent::OtherAgentGoalDist);
}

const std::vector<double>* ObservationFrame::field(std::string_view name) const {
  for (const auto& [k, v] : named) {
    if (k == name) return &v;
  }
  return nullptr;
}

namespace {

std::vector<std::string> pose_fields(const ObserverConfig& cfg) {
  std::vector<std::string> f{"x", "y"};
  if (!cfg.agent_pose_ignore_theta) f.emplace_back("psi");
  if (cfg.agent_velocity_obs) {
    f.emplace_back("vx");
    f.emplace_back("vy");
  }
  f.emplace_back("v_pref");
  return f;
}

std::vector<std::string> slot_fields(const ObserverConfig& cfg) {
  std::vector<std::string> f{"present", "is_human", "dx", "dy"};
  if (!cfg.other_poses_ignore_theta) f.emplace_back("dpsi");
  if (cfg.other_velocities_obs) {
    f.emplace_back("vx");
    f.emplace_back("vy");
  }
  return f;
}

int component_size(ObsComponent c, const ObserverConfig& cfg) {
  switch (c) {
    case ObsComponent::AgentGoalDist: return 1;
    case ObsComponent::AgentsPose: return static_cast<int>(pose_fields(cfg).size());
    case ObsComponent::OtherAgentObservables: return cfg.max_neighbors * neighbor_slot_size(cfg);
    case ObsComponent::OtherAgentGoalDist: return cfg.max_neighbors;
    case ObsComponent::CollisionObservation: return 1;
    case ObsComponent::SuccessObservation: return 1;
  }
  return 0;
}

struct Body {
  int id;
  bool human;
  Vec2 position;
  Vec2 velocity;
  double psi;
  double d_goal;
};

std::vector<Body> other_bodies(int agent_id, const WorldSnapshot& world) {
  std::vector<Body> out;
  for (const auto& a : world.agents) {
    if (a.id == agent_id) continue;
    out.push_back({a.id, false, a.state.pose.position(), a.state.vel, a.state.pose.psi, a.state.d_goal});
  }
  for (const auto& h : world.humans) {
    const double psi = h.velocity.squared_norm() > 0.0 ? std::atan2(h.velocity.y, h.velocity.x) : 0.0;
    out.push_back({h.id, true, h.position, h.velocity, psi, 0.0});
  }
  return out;
}

std::vector<Body> nearest_bodies(int agent_id, const WorldSnapshot& world, int k) {
  const AgentView* self = world.find_agent(agent_id);
  if (!self) throw std::invalid_argument("observe: unknown agent " + std::to_string(agent_id));
  auto bodies = other_bodies(agent_id, world);
  const Vec2 p = self->state.pose.position();
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(bodies.size());
  for (std::size_t i = 0; i < bodies.size(); ++i) order.emplace_back(distance(p, bodies[i].position), i);
  std::sort(order.begin(), order.end(), [&](const auto& l, const auto& r) {
    return std::tie(l.first, bodies[l.second].id) < std::tie(r.first, bodies[r.second].id);
  });
  std::vector<Body> out;
  for (std::size_t i = 0; i < order.size() && static_cast<int>(i) < k; ++i) out.push_back(bodies[order[i].second]);
  return out;
}

}  // namespace

int neighbor_slot_size(const ObserverConfig& cfg) { return static_cast<int>(slot_fields(cfg).size()); }

std::vector<std::pair<std::string, int>> observation_layout(const ObserverConfig& cfg) {
  std::vector<std::pair<std::string, int>> out;
  for (auto c : cfg.components) out.emplace_back(std::string(to_string(c)), component_size(c, cfg));
  return out;
}

int observation_size(const ObserverConfig& cfg) {
  int n = 0;
  for (auto c : cfg.components) n += component_size(c, cfg);
  return n;
}

std::vector<int> nearest_neighbors(int agent_id, const WorldSnapshot& world, int k) {
  std::vector<int> ids;
  for (const auto& b : nearest_bodies(agent_id, world, k)) ids.push_back(b.id);
  return ids;
}

ObservationFrame observe(int agent_id, const WorldSnapshot& world, const ObserverConfig& cfg) {
  const AgentView* self = world.find_agent(agent_id);
  if (!self) throw std::invalid_argument("observe: unknown agent " + std::to_string(agent_id));
  const AgentState& s = self->state;
  const Vec2 origin = s.pose.position();
  const double psi = s.pose.psi;
  const int K = cfg.max_neighbors;

  ObservationFrame frame;
  auto emit = [&](const std::string& comp, const std::vector<std::string>& fields,
                  const std::vector<std::vector<double>>& rows) {
    // rows are slot-major; named entries collect each field across slots
    for (const auto& row : rows) frame.vector.insert(frame.vector.end(), row.begin(), row.end());
    for (std::size_t f = 0; f < fields.size(); ++f) {
      std::vector<double> vals;
      vals.reserve(rows.size());
      for (const auto& row : rows) vals.push_back(row[f]);
      frame.named.emplace_back(comp + "." + fields[f], std::move(vals));
    }
  };

  std::vector<Body> neighbors;
  bool neighbors_ready = false;
  auto get_neighbors = [&]() -> const std::vector<Body>& {
    if (!neighbors_ready) {
      neighbors = nearest_bodies(agent_id, world, K);
      neighbors_ready = true;
    }
    return neighbors;
  };

  for (auto c : cfg.components) {
    const std::string name(to_string(c));
    switch (c) {
      case ObsComponent::AgentGoalDist:
        emit(name, {"d_goal"}, {{s.d_goal}});
        break;
      case ObsComponent::AgentsPose: {
        std::vector<double> row{s.pose.x, s.pose.y};
        if (!cfg.agent_pose_ignore_theta) row.push_back(psi);
        if (cfg.agent_velocity_obs) {
          const Vec2 v = cfg.agent_velocity_ignore_theta ? s.vel : s.vel.rotated(-psi);
          row.push_back(v.x);
          row.push_back(v.y);
        }
        row.push_back(self->v_pref);
        emit(name, pose_fields(cfg), {row});
        break;
      }
      case ObsComponent::OtherAgentObservables: {
        const auto fields = slot_fields(cfg);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(K), std::vector<double>(fields.size(), 0.0));
        const auto& nb = get_neighbors();
        for (std::size_t i = 0; i < nb.size(); ++i) {
          const Body& b = nb[i];
          auto& row = rows[i];
          std::size_t f = 0;
          row[f++] = 1.0;
          row[f++] = b.human ? 1.0 : 0.0;
          const Vec2 rel = cfg.other_poses_ignore_theta ? b.position - origin : (b.position - origin).rotated(-psi);
          row[f++] = rel.x;
          row[f++] = rel.y;
          if (!cfg.other_poses_ignore_theta) row[f++] = wrap_angle(b.psi - psi);
          if (cfg.other_velocities_obs) {
            const Vec2 v = cfg.other_velocities_ignore_theta ? b.velocity : b.velocity.rotated(-psi);
            row[f++] = v.x;
            row[f++] = v.y;
          }
        }
        emit(name, fields, rows);
        break;
      }
      case ObsComponent::OtherAgentGoalDist: {
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(K), std::vector<double>{0.0});
        const auto& nb = get_neighbors();
        for (std::size_t i = 0; i < nb.size(); ++i) rows[i][0] = nb[i].d_goal;
        emit(name, {"d_goal"}, rows);
        break;
      }
      case ObsComponent::CollisionObservation:
        emit(name, {"collision"}, {{self->colliding ? 1.0 : 0.0}});
        break;
      case ObsComponent::SuccessObservation:
        emit(name, {"success"}, {{self->succeeded ? 1.0 : 0.0}});
        break;
    }
  }
  return frame;
}

}  // namespace minisocial
