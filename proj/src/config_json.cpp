#include "minisocial/config_json.hpp"

namespace minisocial {

ObjectReader::ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
  if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
}

const json& ObjectReader::at(const std::string& key) {
  if (!obj_.contains(key)) throw ConfigError(path(key) + ": missing");
  used_.insert(key);
  return obj_.at(key);
}

void ObjectReader::finish() const {
  std::string unknown;
  for (const auto& [k, v] : obj_.items()) {
    if (used_.contains(k)) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += path_ + "." + k;
  }
  if (!unknown.empty()) throw ConfigError("unknown config key(s): " + unknown);
}

namespace {

template <typename Fn>
void checked(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

json to_json(const KinodynamicConfig& c) {
  return {{"drive_type", std::string(to_string(c.drive_type))},
          {"v_max", c.v_max},
          {"v_pref", c.v_pref},
          {"a_max", c.a_max},
          {"omega_max", c.omega_max},
          {"alpha_max", c.alpha_max},
          {"radius", c.radius},
          {"wheelbase", c.wheelbase}};
}

void from_json(const json& j, KinodynamicConfig& out, const std::string& path) {
  ObjectReader r(j, path);
  std::string drive(to_string(out.drive_type));
  r.read("drive_type", drive);
  checked(path + ".drive_type", [&] { out.drive_type = drive_type_from_string(drive); });
  r.read("v_max", out.v_max);
  r.read("v_pref", out.v_pref);
  r.read("a_max", out.a_max);
  r.read("omega_max", out.omega_max);
  r.read("alpha_max", out.alpha_max);
  r.read("radius", out.radius);
  r.read("wheelbase", out.wheelbase);
  r.finish();
  checked(path, [&] { out.validate(); });
}

json to_json(const PlannerParams& c) {
  return {{"num_candidates", c.num_candidates}, {"horizon", c.horizon},
          {"w_align", c.w_align},               {"w_clear", c.w_clear},
          {"clearance_cap", c.clearance_cap},   {"waypoint_radius", c.waypoint_radius},
          {"safety_margin", c.safety_margin}};
}

void from_json(const json& j, PlannerParams& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("num_candidates", out.num_candidates);
  r.read("horizon", out.horizon);
  r.read("w_align", out.w_align);
  r.read("w_clear", out.w_clear);
  r.read("clearance_cap", out.clearance_cap);
  r.read("waypoint_radius", out.waypoint_radius);
  r.read("safety_margin", out.safety_margin);
  r.finish();
  checked(path, [&] { out.validate(); });
}

json to_json(const SocialForceParams& c) {
  return {{"enabled", c.enabled},
          {"tau", c.tau},
          {"A", c.agent_strength},
          {"B", c.agent_range},
          {"A_w", c.wall_strength},
          {"B_w", c.wall_range},
          {"v_pref", c.v_pref},
          {"radius", c.radius},
          {"speed_cap_factor", c.speed_cap_factor},
          {"goal_hold_radius", c.goal_hold_radius}};
}

void from_json(const json& j, SocialForceParams& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("enabled", out.enabled);
  r.read("tau", out.tau);
  r.read("A", out.agent_strength);
  r.read("B", out.agent_range);
  r.read("A_w", out.wall_strength);
  r.read("B_w", out.wall_range);
  r.read("v_pref", out.v_pref);
  r.read("radius", out.radius);
  r.read("speed_cap_factor", out.speed_cap_factor);
  r.read("goal_hold_radius", out.goal_hold_radius);
  r.finish();
  checked(path, [&] { out.validate(); });
}

json to_json(const ObserverConfig& c) {
  json comps = json::array();
  for (auto comp : c.components) comps.push_back(std::string(to_string(comp)));
  return {{"components", comps},
          {"max_neighbors", c.max_neighbors},
          {"agent_pose_ignore_theta", c.agent_pose_ignore_theta},
          {"agent_velocity_obs", c.agent_velocity_obs},
          {"agent_velocity_ignore_theta", c.agent_velocity_ignore_theta},
          {"other_poses_ignore_theta", c.other_poses_ignore_theta},
          {"other_velocities_obs", c.other_velocities_obs},
          {"other_velocities_ignore_theta", c.other_velocities_ignore_theta}};
}

void from_json(const json& j, ObserverConfig& out, const std::string& path) {
  ObjectReader r(j, path);
  if (r.has("components")) {
    std::vector<std::string> names;
    r.read("components", names);
    out.components.clear();
    checked(path + ".components", [&] {
      for (const auto& n : names) out.components.push_back(obs_component_from_string(n));
    });
  }
  r.read("max_neighbors", out.max_neighbors);
  r.read("agent_pose_ignore_theta", out.agent_pose_ignore_theta);
  r.read("agent_velocity_obs", out.agent_velocity_obs);
  r.read("agent_velocity_ignore_theta", out.agent_velocity_ignore_theta);
  r.read("other_poses_ignore_theta", out.other_poses_ignore_theta);
  r.read("other_velocities_obs", out.other_velocities_obs);
  r.read("other_velocities_ignore_theta", out.other_velocities_ignore_theta);
  r.finish();
  checked(path, [&] { out.validate(); });
}

json to_json(const RewarderConfig& c) {
  json terms = json::array();
  for (const auto& t : c.terms) {
    json e = {{"kind", std::string(to_string(t.kind))}, {"weight", t.weight}};
    if (t.schedule_duration) e["schedule_duration"] = *t.schedule_duration;
    if (t.kind == RewardKind::Proximity) e["threshold"] = t.threshold;
    if (t.kind == RewardKind::Stall) e["only_unfinished"] = t.only_unfinished;
    terms.push_back(std::move(e));
  }
  return {{"terms", terms}, {"normalize", c.normalize}};
}

void from_json(const json& j, RewarderConfig& out, const std::string& path) {
  ObjectReader r(j, path);
  if (r.has("terms")) {
    const json& terms = r.at("terms");
    if (!terms.is_array()) throw ConfigError(path + ".terms: expected an array");
    out.terms.clear();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tp = path + ".terms[" + std::to_string(i) + "]";
      ObjectReader tr(terms[i], tp);
      RewardTermConfig t;
      std::string kind;
      tr.read("kind", kind);
      checked(tp + ".kind", [&] { t.kind = reward_kind_from_string(kind); });
      tr.read("weight", t.weight);
      if (tr.has("schedule_duration")) {
        std::int64_t d = 0;
        tr.read("schedule_duration", d);
        t.schedule_duration = d;
      }
      tr.read("threshold", t.threshold);
      tr.read("only_unfinished", t.only_unfinished);
      tr.finish();
      out.terms.push_back(t);
    }
  }
  r.read("normalize", out.normalize);
  r.finish();
  checked(path, [&] { out.validate(); });
}

json to_json(const MiniGameParams& c) {
  return {{"scale", c.scale},         {"corridor_width", c.corridor_width}, {"gap_width", c.gap_width},
          {"arm_count", c.arm_count}, {"ring_radius", c.ring_radius},       {"length", c.length},
          {"max_agents", c.max_agents}, {"bidirectional", c.bidirectional}};
}

void from_json(const json& j, MiniGameParams& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("scale", out.scale);
  r.read("corridor_width", out.corridor_width);
  r.read("gap_width", out.gap_width);
  r.read("arm_count", out.arm_count);
  r.read("ring_radius", out.ring_radius);
  r.read("length", out.length);
  r.read("max_agents", out.max_agents);
  r.read("bidirectional", out.bidirectional);
  r.finish();
  out.validate();
}

}  // namespace minisocial
