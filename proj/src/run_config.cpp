#include "minisocial/run_config.hpp"

#include <algorithm>

#include "minisocial/config_json.hpp"
#include "minisocial/geometry_io.hpp"

namespace minisocial {

json RunConfig::to_json() const {
  json j;
  json sched = json::array();
  for (const auto& [ep, k] : num_agents) sched.push_back(json::array({ep, k}));
  j["num_agents"] = sched;
  j["eval_num_agents"] = eval_num_agents;
  j["train_length"] = train_length;
  j["ending_eval_trials"] = ending_eval_trials;
  j["eval_frequency"] = eval_frequency;
  j["intermediate_eval_trials"] = intermediate_eval_trials;
  j["policy_algo_sb3_contrib"] = policy_algo_sb3_contrib;
  j["policy_algo_name"] = policy_algo_name;
  j["policy_name"] = policy_name;
  j["policy_algo_kwargs"] = policy_algo_kwargs;
  j["monitor"] = monitor;
  j["experiment_names"] = experiment_names;
  j["run_name"] = run_name;
  j["run_type"] = run_type;
  j["device"] = device;
  j["other_velocities_obs"] = other_velocities_obs;
  j["agent_velocity_obs"] = agent_velocity_obs;
  j["agent_velocity_ignore_theta"] = agent_velocity_ignore_theta;
  j["other_velocities_ignore_theta"] = other_velocities_ignore_theta;
  j["other_poses_ignore_theta"] = other_poses_ignore_theta;
  j["agent_pose_ignore_theta"] = agent_pose_ignore_theta;
  j["entropy_constant_penalty"] = entropy_constant_penalty;
  j["entropy_constant_penalty_only_not_finish"] = entropy_constant_penalty_only_not_finish;
  j["dt"] = dt;
  j["seed"] = seed;
  j["planner"] = minisocial::to_json(planner);
  j["humans"] = minisocial::to_json(humans);
  j["kinodynamics"] = minisocial::to_json(kinodynamics);
  j["metrics"] = json{{"csv", metrics.csv}, {"table", metrics.table}};
  j["max_steps"] = max_steps;
  j["stall_window"] = stall_window;
  j["stall_delta"] = stall_delta;
  j["terminate_on_collision"] = terminate_on_collision;
  j["zone_radius"] = zone_radius;
  j["max_neighbors"] = max_neighbors;
  j["other_agent_goal_dist_obs"] = other_agent_goal_dist_obs;
  if (rewards) j["rewards"] = minisocial::to_json(*rewards);
  j["learner"] = minisocial::to_json(learner);
  json sp = json::array();
  for (const auto& p : scenario_params) sp.push_back(minisocial::to_json(p));
  j["scenario_params"] = sp;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  ObjectReader r(j, "config");
  if (r.has("num_agents")) {
    const json& s = r.at("num_agents");
    if (!s.is_array()) throw ConfigError("config.num_agents: expected a list of [episode, k] pairs");
    c.num_agents.clear();
    for (const auto& e : s) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        throw ConfigError("config.num_agents: expected a list of [episode, k] pairs");
      }
      c.num_agents.emplace_back(e[0].get<std::int64_t>(), e[1].get<int>());
    }
  }
  r.read("eval_num_agents", c.eval_num_agents);
  r.read("train_length", c.train_length);
  r.read("ending_eval_trials", c.ending_eval_trials);
  r.read("eval_frequency", c.eval_frequency);
  r.read("intermediate_eval_trials", c.intermediate_eval_trials);
  r.read("policy_algo_sb3_contrib", c.policy_algo_sb3_contrib);
  r.read("policy_algo_name", c.policy_algo_name);
  r.read("policy_name", c.policy_name);
  if (r.has("policy_algo_kwargs")) {
    c.policy_algo_kwargs = r.at("policy_algo_kwargs");
    if (!c.policy_algo_kwargs.is_object()) throw ConfigError("config.policy_algo_kwargs: expected an object");
  }
  r.read("monitor", c.monitor);
  r.read("experiment_names", c.experiment_names);
  r.read("run_name", c.run_name);
  r.read("run_type", c.run_type);
  r.read("device", c.device);
  r.read("other_velocities_obs", c.other_velocities_obs);
  r.read("agent_velocity_obs", c.agent_velocity_obs);
  r.read("agent_velocity_ignore_theta", c.agent_velocity_ignore_theta);
  r.read("other_velocities_ignore_theta", c.other_velocities_ignore_theta);
  r.read("other_poses_ignore_theta", c.other_poses_ignore_theta);
  r.read("agent_pose_ignore_theta", c.agent_pose_ignore_theta);
  r.read("entropy_constant_penalty", c.entropy_constant_penalty);
  r.read("entropy_constant_penalty_only_not_finish", c.entropy_constant_penalty_only_not_finish);

  r.read("dt", c.dt);
  r.read("seed", c.seed);
  if (r.has("planner")) minisocial::from_json(r.at("planner"), c.planner, "config.planner");
  if (r.has("humans")) minisocial::from_json(r.at("humans"), c.humans, "config.humans");
  if (r.has("kinodynamics")) minisocial::from_json(r.at("kinodynamics"), c.kinodynamics, "config.kinodynamics");
  if (r.has("metrics")) {
    ObjectReader m(r.at("metrics"), "config.metrics");
    m.read("csv", c.metrics.csv);
    m.read("table", c.metrics.table);
    m.finish();
  }
  r.read("max_steps", c.max_steps);
  r.read("stall_window", c.stall_window);
  r.read("stall_delta", c.stall_delta);
  r.read("terminate_on_collision", c.terminate_on_collision);
  r.read("zone_radius", c.zone_radius);
  r.read("max_neighbors", c.max_neighbors);
  r.read("other_agent_goal_dist_obs", c.other_agent_goal_dist_obs);
  if (r.has("rewards")) {
    RewarderConfig rw;
    minisocial::from_json(r.at("rewards"), rw, "config.rewards");
    c.rewards = rw;
  }
  if (r.has("learner")) c.learner = learner_config_from_json(r.at("learner"));
  if (r.has("scenario_params")) {
    const json& sp = r.at("scenario_params");
    if (!sp.is_array()) throw ConfigError("config.scenario_params: expected a list");
    for (std::size_t i = 0; i < sp.size(); ++i) {
      MiniGameParams p;
      const std::string path = "config.scenario_params[" + std::to_string(i) + "]";
      if (!sp[i].is_object() || !sp[i].contains("kind")) throw ConfigError(path + ": needs a kind");
      const auto kind = mini_game_from_string(sp[i]["kind"].is_string() ? sp[i]["kind"].get<std::string>() : "");
      if (!kind) throw ConfigError(path + ".kind: unknown mini-game");
      p = default_params(*kind);
      minisocial::from_json(sp[i], p, path);
      c.scenario_params.push_back(p);
    }
  }
  r.finish();

  if (c.eval_num_agents.empty()) throw ConfigError("config.eval_num_agents: must not be empty");
  for (int k : c.eval_num_agents) {
    if (k <= 0) throw ConfigError("config.eval_num_agents: k must be positive");
  }
  if (c.train_length < 0) throw ConfigError("config.train_length: must be >= 0");
  if (c.ending_eval_trials < 0) throw ConfigError("config.ending_eval_trials: must be >= 0");
  if (c.eval_frequency < 0) throw ConfigError("config.eval_frequency: must be >= 0");
  if (c.experiment_names.empty()) throw ConfigError("config.experiment_names: must not be empty");

  // compatibility keys: accepted, only the documented knobs act
  if (c.policy_algo_name != "PPO") {
    c.warnings.push_back("policy_algo_name '" + c.policy_algo_name + "' is not available; using the built-in PPO");
  }
  if (c.policy_algo_sb3_contrib) c.warnings.push_back("policy_algo_sb3_contrib is ignored");
  if (c.policy_name != "MlpPolicy") {
    c.warnings.push_back("policy_name '" + c.policy_name + "' is not available; using MlpPolicy");
  }
  if (c.device != "cpu" && c.device != "auto") {
    c.warnings.push_back("device '" + c.device + "' is not available; running on cpu");
  }
  (void)c.learner_config(&c.warnings);
  EnvConfig probe;
  apply_run_type(c.run_type, probe);
  if (c.max_steps <= 0) throw ConfigError("config.max_steps: must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("config.dt: must be positive");
  return c;
}

LearnerConfig RunConfig::learner_config(std::vector<std::string>* warnings_out) const {
  LearnerConfig l = learner;
  for (const auto& [key, value] : policy_algo_kwargs.items()) {
    auto num = [&](auto& out) {
      if (!value.is_number()) throw ConfigError("config.policy_algo_kwargs." + key + ": expected a number");
      out = value.get<std::remove_reference_t<decltype(out)>>();
    };
    if (key == "learning_rate") num(l.learning_rate);
    else if (key == "gamma") num(l.gamma);
    else if (key == "gae_lambda") num(l.gae_lambda);
    else if (key == "clip_range") num(l.clip);
    else if (key == "ent_coef") num(l.entropy_coef);
    else if (key == "vf_coef") num(l.value_coef);
    else if (key == "max_grad_norm") num(l.max_grad_norm);
    else if (key == "n_epochs") num(l.epochs);
    else if (key == "batch_size") num(l.minibatch);
    else {
      const std::string msg = "policy_algo_kwargs." + key + " is ignored" +
                              (key == "n_steps" ? " (batches are whole episodes, see learner.batch_episodes)" : "");
      if (warnings_out) warnings_out->push_back(msg);
    }
  }
  l.validate();
  return l;
}

std::shared_ptr<const ScenarioSource> resolve_scenario(const std::string& name, const std::filesystem::path& base_dir,
                                                       const std::vector<MiniGameParams>& overrides) {
  if (auto kind = mini_game_from_string(name)) {
    for (const auto& p : overrides) {
      if (p.kind == *kind) return generate(p);
    }
    return generate(*kind);
  }
  std::filesystem::path path(name);
  if (path.is_relative()) path = base_dir / path;
  if (!std::filesystem::exists(path)) {
    throw ConfigError("experiment_names: '" + name + "' is neither a mini-game nor an existing scenario file");
  }
  try {
    auto b = load_bundle(path);
    const auto problems = check_bundle(b);
    if (!problems.empty()) throw ConfigError("scenario " + path.string() + ": " + problems.front());
    return std::make_shared<FileScenario>(path.stem().string(), std::move(b.map), std::move(b.graph),
                                          std::move(b.scenario));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("scenario " + path.string() + ": " + e.what());
  }
}

ScenarioSet RunConfig::scenarios() const {
  ScenarioSet set;
  for (const auto& n : experiment_names) set.push_back(resolve_scenario(n, base_dir, scenario_params));
  return set;
}

EnvConfig RunConfig::env_config() const {
  EnvConfig e;
  e.scenarios = scenarios();
  e.num_agents = num_agents;
  e.max_steps = max_steps;
  e.dt = dt;
  e.stall_window = stall_window;
  e.stall_delta = stall_delta;
  e.terminate_on_collision = terminate_on_collision;
  e.seed = seed;
  e.kinodynamics = kinodynamics;
  e.planner = planner;
  e.humans = humans;
  e.observer.max_neighbors = max_neighbors;
  e.observer.agent_pose_ignore_theta = agent_pose_ignore_theta;
  e.observer.agent_velocity_obs = agent_velocity_obs;
  e.observer.agent_velocity_ignore_theta = agent_velocity_ignore_theta;
  e.observer.other_poses_ignore_theta = other_poses_ignore_theta;
  e.observer.other_velocities_obs = other_velocities_obs;
  e.observer.other_velocities_ignore_theta = other_velocities_ignore_theta;
  e.observer.set_other_goal_dist(other_agent_goal_dist_obs);
  apply_run_type(run_type, e);
  if (rewards) e.rewarder = *rewards;
  for (auto& t : e.rewarder.terms) {
    if (t.kind == RewardKind::Stall) {
      t.weight = entropy_constant_penalty;
      t.only_unfinished = entropy_constant_penalty_only_not_finish;
    }
  }
  e.zone_radius = zone_radius;
  e.validate();
  return e;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  RunConfig c = RunConfig::from_json(j);
  c.base_dir = path.parent_path();
  return c;
}

}  // namespace minisocial
