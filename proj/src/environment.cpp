#include "minisocial/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "minisocial/config_json.hpp"

namespace minisocial {

void EnvConfig::validate() const {
  if (scenarios.empty()) throw ConfigError("env: scenario set is empty");
  if (num_agents.empty() || num_agents.front().first != 0) {
    throw ConfigError("env: num_agents schedule must start at episode 0");
  }
  for (std::size_t i = 0; i < num_agents.size(); ++i) {
    if (num_agents[i].second < 1) throw ConfigError("env: num_agents entries need k >= 1");
    if (i > 0 && num_agents[i].first <= num_agents[i - 1].first) {
      throw ConfigError("env: num_agents episode indices must be strictly increasing");
    }
  }
  if (max_steps <= 0) throw ConfigError("env: max_steps must be > 0");
  if (!(dt > 0.0)) throw ConfigError("env: dt must be > 0");
  if (stall_window < 1) throw ConfigError("env: stall_window must be >= 1");
  if (!(stall_delta > 0.0)) throw ConfigError("env: stall_delta must be > 0");
  if (!(zone_radius > 0.0)) throw ConfigError("env: zone_radius must be > 0");
  try {
    kinodynamics.validate();
    planner.validate();
    humans.validate();
    observer.validate();
    rewarder.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("env: ") + e.what());
  }
}

int EnvConfig::agents_for_episode(std::int64_t episode_index) const {
  int k = num_agents.front().second;
  for (const auto& [from, n] : num_agents) {
    if (episode_index >= from) k = n;
  }
  return k;
}

json EnvConfig::to_json() const {
  json j;
  json ids = json::array();
  for (const auto& s : scenarios) ids.push_back(s->id());
  j["scenarios"] = ids;
  json sched = json::array();
  for (const auto& [from, k] : num_agents) sched.push_back({from, k});
  j["num_agents"] = sched;
  j["max_steps"] = max_steps;
  j["dt"] = dt;
  j["stall_window"] = stall_window;
  j["stall_delta"] = stall_delta;
  j["terminate_on_collision"] = terminate_on_collision;
  j["seed"] = seed;
  j["kinodynamics"] = minisocial::to_json(kinodynamics);
  j["planner"] = minisocial::to_json(planner);
  j["humans"] = minisocial::to_json(humans);
  j["observer"] = minisocial::to_json(observer);
  j["rewards"] = minisocial::to_json(rewarder);
  j["order_mode"] = std::string(to_string(order_mode));
  j["zone_radius"] = zone_radius;
  return j;
}

std::string EnvConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buf;
}

bool detect_stall(const std::deque<std::vector<Vec2>>& history, double delta) {
  double moved = 0.0;
  for (std::size_t f = 1; f < history.size(); ++f) {
    const auto& a = history[f - 1];
    const auto& b = history[f];
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) moved += distance(a[i], b[i]);
  }
  return moved < delta;
}

Environment::Environment(EnvConfig config) : cfg_(std::move(config)) {
  cfg_.validate();
  config_hash_ = cfg_.hash();
}

std::vector<ObservationFrame> Environment::reset(std::int64_t episode_index) {
  const int k = cfg_.agents_for_episode(episode_index);
  CounterRng rng = CounterRng(cfg_.seed).split("episode").split(static_cast<std::uint64_t>(episode_index));

  std::vector<const ScenarioSource*> fits;
  for (const auto& s : cfg_.scenarios) {
    if (s->max_agents() >= k) fits.push_back(s.get());
  }
  if (fits.empty()) throw ConfigError("no scenario in the set supports " + std::to_string(k) + " agents");
  CounterRng pick = rng.split("scenario");
  source_ = fits[pick.below(fits.size())];
  CounterRng route_rng = rng.split("routes");
  routes_ = source_->sample_agent_routes(k, route_rng);
  const NavGraph& graph = source_->graph();

  agents_.assign(static_cast<std::size_t>(k), Agent{});
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& ids = routes_[i].node_ids;
    const Vec2 start = graph.position(ids.front());
    double psi = 0.0;
    if (ids.size() > 1) {
      const Vec2 d = graph.position(ids[1]) - start;
      psi = std::atan2(d.y, d.x);
    }
    agents_[i].state.pose = {start.x, start.y, psi};
    refresh_waypoint(agents_[i], i);
  }

  humans_.clear();
  for (const auto& r : source_->human_routes()) {
    if (!cfg_.humans.enabled) break;
    Human h;
    h.route = r;
    h.state.position = graph.position(r.node_ids.front());
    h.target = r.node_ids.size() > 1 ? 1 : 0;
    h.state.goal = graph.position(r.node_ids[h.target]);
    h.state.v_pref = cfg_.humans.v_pref;
    h.state.radius = cfg_.humans.radius;
    humans_.push_back(std::move(h));
  }

  zone_.reset();
  assigned_rank_.clear();
  if (auto common = find_common_point(routes_, graph)) zone_.emplace(*common, cfg_.zone_radius, k);
  if (cfg_.order_mode == OrderMode::EnforcedOrder) {
    CounterRng order_rng = rng.split("order");
    assigned_rank_ = draw_enforced_order(k, order_rng);
  }

  history_.clear();
  record_positions();
  t_ = 0;
  done_ = false;

  log_ = EpisodeLog{};
  log_.scenario = source_->id();
  log_.policy = policy_name_;
  log_.k = k;
  log_.seed = cfg_.seed;
  log_.episode = episode_index;
  log_.config_hash = config_hash_;
  log_.dt = cfg_.dt;
  log_.max_steps = cfg_.max_steps;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    log_.init.push_back({static_cast<int>(i), agents_[i].state.pose, cfg_.kinodynamics.radius, routes_[i].node_ids});
  }
  return observe_all(snapshot());
}

void Environment::place_agent(int id, const Pose& pose, std::size_t route_progress) {
  if (id < 0 || id >= num_agents()) throw ContractError("place_agent: unknown agent " + std::to_string(id));
  auto& a = agents_[static_cast<std::size_t>(id)];
  a.state.pose = pose;
  a.state.route_progress = route_progress;
  refresh_waypoint(a, static_cast<std::size_t>(id));
  log_.init[static_cast<std::size_t>(id)].pose = pose;
  history_.clear();
  record_positions();
}

void Environment::refresh_waypoint(Agent& a, std::size_t id) {
  const auto wp = advance_waypoint(a.state.pose.position(), a.state.route_progress, routes_[id], source_->graph(),
                                   cfg_.planner.waypoint_radius);
  a.state.route_progress = wp.route_progress;
  a.state.d_goal = wp.d_goal;
}

void Environment::record_positions() {
  std::vector<Vec2> frame;
  frame.reserve(agents_.size());
  for (const auto& a : agents_) frame.push_back(a.state.pose.position());
  history_.push_back(std::move(frame));
  while (history_.size() > static_cast<std::size_t>(cfg_.stall_window) + 1) history_.pop_front();
}

bool Environment::stalled() const {
  return history_.size() == static_cast<std::size_t>(cfg_.stall_window) + 1 && detect_stall(history_, cfg_.stall_delta);
}

WorldSnapshot Environment::snapshot() const {
  WorldSnapshot w;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    w.agents.push_back({static_cast<int>(i), agents_[i].state, cfg_.kinodynamics.radius, cfg_.kinodynamics.v_pref,
                        agents_[i].succeeded, agents_[i].colliding});
  }
  for (std::size_t h = 0; h < humans_.size(); ++h) {
    w.humans.push_back({static_cast<int>(agents_.size() + h), humans_[h].state.position, humans_[h].state.velocity,
                        humans_[h].state.radius});
  }
  return w;
}

std::vector<int> Environment::live_agents() const {
  std::vector<int> ids;
  if (done_) return ids;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (!agents_[i].succeeded) ids.push_back(static_cast<int>(i));
  }
  return ids;
}

std::vector<Disc> Environment::obstacles_for(std::size_t self) const {
  std::vector<Disc> out;
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    if (j != self) out.push_back({agents_[j].state.pose.position(), cfg_.kinodynamics.radius});
  }
  for (const auto& h : humans_) out.push_back({h.state.position, h.state.radius});
  return out;
}

std::vector<ObservationFrame> Environment::observe_all(const WorldSnapshot& world) const {
  std::vector<ObservationFrame> out;
  for (std::size_t i = 0; i < agents_.size(); ++i) out.push_back(observe(static_cast<int>(i), world, cfg_.observer));
  return out;
}

void Environment::abort(const std::string& reason) {
  if (done_) return;
  done_ = true;
  log_.reason = reason;
  log_.length = static_cast<int>(log_.steps.size());
}

StepResult Environment::step(const std::vector<std::pair<int, Action>>& actions) {
  if (done_) throw ContractError("step called on a finished episode; call reset first");
  const std::size_t n = agents_.size();
  std::vector<std::optional<Action>> chosen(n);
  for (const auto& [id, act] : actions) {
    if (id < 0 || static_cast<std::size_t>(id) >= n) throw ContractError("action for unknown agent " + std::to_string(id));
    const auto i = static_cast<std::size_t>(id);
    if (agents_[i].succeeded) throw ContractError("action for terminated agent " + std::to_string(id));
    if (chosen[i]) throw ContractError("duplicate action for agent " + std::to_string(id));
    chosen[i] = act;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!agents_[i].succeeded && !chosen[i]) throw ContractError("missing action for agent " + std::to_string(i));
  }

  const WorldSnapshot prev = snapshot();
  const NavGraph& graph = source_->graph();
  const auto& walls = source_->map().segments;
  const auto& kin = cfg_.kinodynamics;

  // plan every agent against the same pre-step snapshot, then move them together
  std::vector<AgentState> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (agents_[i].succeeded) {
      next[i] = agents_[i].state;
      continue;
    }
    const auto others = obstacles_for(i);
    const MotionCommand cmd =
        plan_step(agents_[i].state, *chosen[i], routes_[i], graph, walls, others, kin, cfg_.planner, cfg_.dt);
    next[i] = integrate(agents_[i].state, cmd, kin, cfg_.dt);
  }

  if (!humans_.empty()) {
    std::vector<Neighbor> robots;
    for (const auto& a : prev.agents) robots.push_back({a.state.pose.position(), a.state.vel, a.radius});
    std::vector<HumanState> hs;
    for (const auto& h : humans_) hs.push_back(h.state);
    hs = step_humans(hs, robots, walls, cfg_.humans, cfg_.dt);
    for (std::size_t h = 0; h < humans_.size(); ++h) {
      auto& hu = humans_[h];
      hu.state = hs[h];
      const std::size_t last = hu.route.node_ids.size() - 1;
      while (hu.target < last && distance(hu.state.position, hu.state.goal) < cfg_.humans.goal_hold_radius) {
        ++hu.target;
        hu.state.goal = graph.position(hu.route.node_ids[hu.target]);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (agents_[i].succeeded) continue;
    agents_[i].state = next[i];
    refresh_waypoint(agents_[i], i);
  }

  std::vector<std::vector<int>> colliders(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 pi = agents_[i].state.pose.position();
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(pi, agents_[j].state.pose.position()) < 2.0 * kin.radius) {
        colliders[i].push_back(static_cast<int>(j));
        colliders[j].push_back(static_cast<int>(i));
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 pi = agents_[i].state.pose.position();
    if (distance_to_walls(pi, walls) < kin.radius) colliders[i].push_back(-1);
    for (std::size_t h = 0; h < humans_.size(); ++h) {
      if (distance(pi, humans_[h].state.position) < kin.radius + humans_[h].state.radius) {
        colliders[i].push_back(static_cast<int>(n + h));
      }
    }
    std::sort(colliders[i].begin(), colliders[i].end());
    agents_[i].colliding = !colliders[i].empty();
  }

  std::vector<bool> live_before(n);
  for (std::size_t i = 0; i < n; ++i) live_before[i] = !agents_[i].succeeded;
  for (std::size_t i = 0; i < n; ++i) {
    if (agents_[i].succeeded) continue;
    auto& st = agents_[i].state;
    const std::size_t last = routes_[i].node_ids.size() - 1;
    if (st.route_progress == last && st.d_goal < cfg_.planner.waypoint_radius) {
      agents_[i].succeeded = true;
      st.vel = {};
      st.speed = 0.0;
      st.v = 0.0;
      st.omega = 0.0;
    }
  }

  std::vector<bool> zone_passed(n, false);
  if (zone_) {
    std::vector<Vec2> pos;
    for (const auto& a : agents_) pos.push_back(a.state.pose.position());
    for (int id : zone_->update(pos)) {
      const auto i = static_cast<std::size_t>(id);
      const int assigned = assigned_rank_.empty() ? 0 : assigned_rank_[i];
      zone_passed[i] = order_reward_earned(cfg_.order_mode, zone_->rank(id), assigned);
    }
  }

  record_positions();
  ++t_;
  const bool stall = stalled();
  const bool all_done = std::all_of(agents_.begin(), agents_.end(), [](const Agent& a) { return a.succeeded; });
  const bool any_collision =
      std::any_of(agents_.begin(), agents_.end(), [](const Agent& a) { return a.colliding; });

  StepResult result;
  if (all_done) {
    result.reason = "success";
  } else if (cfg_.terminate_on_collision && any_collision) {
    result.reason = "collision";
  } else if (stall) {
    result.reason = "stall";
  } else if (t_ >= cfg_.max_steps) {
    result.reason = "max_steps";
  }
  result.done = !result.reason.empty();

  const WorldSnapshot now = snapshot();
  LogStep rec;
  rec.t = t_ - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = agents_[i].state;
    LogAgentStep la{static_cast<int>(i), st.pose.x, st.pose.y, st.pose.psi, st.speed, chosen[i], 0.0,
                    colliders[i], agents_[i].succeeded};
    if (live_before[i]) {
      RewardEvents ev{!colliders[i].empty(), stall, zone_passed[i]};
      AgentStepResult r;
      r.id = static_cast<int>(i);
      r.reward = reward(r.id, prev, now, ev, cfg_.rewarder, global_step_);
      r.observation = observe(r.id, now, cfg_.observer);
      r.terminated = agents_[i].succeeded || result.done;
      r.info = {!colliders[i].empty(), agents_[i].succeeded, st.d_goal};
      la.reward = r.reward.total;
      result.agents.push_back(std::move(r));
    }
    rec.agents.push_back(std::move(la));
  }
  for (const auto& h : now.humans) rec.humans.push_back({h.id, h.position.x, h.position.y});
  log_.steps.push_back(std::move(rec));
  ++global_step_;

  if (result.done) {
    done_ = true;
    log_.reason = result.reason;
    log_.length = static_cast<int>(log_.steps.size());
  }
  return result;
}

}  // namespace minisocial
