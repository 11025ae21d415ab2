#pragma once

// Fixtures shared by the unit suites and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/socket.h>

#include "minisocial/baselines.hpp"
#include "minisocial/environment.hpp"
#include "minisocial/protocol.hpp"

namespace minisocial::testing {

using Failures = std::vector<std::string>;

// Agent 0 drives 1.5 m east to its goal. Agent 1 starts 0.2 m below a wall,
// so it is in contact from the first step and never moves.
inline std::shared_ptr<const ScenarioSource> trace_scenario() {
  VectorMap map{"trace", {{{-1, 3.2}, {3, 3.2}}}};
  NavGraph g("trace");
  g.add_node(1, {0, 0});
  g.add_node(2, {1.5, 0});
  g.add_node(3, {0, 3});
  g.add_node(4, {2, 3});
  g.add_edge(1, 2);
  g.add_edge(3, 4);
  Scenario sc{"trace", "trace", {Route{{1, 2}}, Route{{3, 4}}}, {}};
  return std::make_shared<FileScenario>("trace", map, g, sc, false);
}

inline EnvConfig trace_config() {
  EnvConfig cfg;
  cfg.scenarios = {trace_scenario()};
  cfg.num_agents = {{0, 2}};
  return cfg;
}

inline std::string describe(int t, int id, const std::string& term, double got, double want) {
  std::ostringstream s;
  s.precision(17);
  s << "t=" << t << " agent " << id << " " << term << ": got " << got << " want " << want;
  return s.str();
}

struct TraceSummary {
  Failures failures;
  int success_steps = 0;
  int collision_steps = 0;
  int stall_hits = 0;
  double progress_total = 0.0;
  std::string reason;
};

// Agent 0 always GO, agent 1 always STOP; every term is compared exactly.
inline TraceSummary run_reward_trace() {
  TraceSummary out;
  Environment env(trace_config());
  env.reset(0);
  std::vector<double> d_prev;
  for (const auto& a : env.snapshot().agents) d_prev.push_back(a.state.d_goal);
  std::vector<bool> done_agent(2, false);

  while (!env.done()) {
    std::vector<std::pair<int, Action>> acts;
    for (int id : env.live_agents()) acts.emplace_back(id, id == 0 ? Action::Go : Action::Stop);
    const int t = env.step_count();
    const auto r = env.step(acts);
    for (const auto& a : r.agents) {
      const auto want = [&](const std::string& term, double value) {
        if (a.reward.term(term) != value) out.failures.push_back(describe(t, a.id, term, a.reward.term(term), value));
      };
      const auto i = static_cast<std::size_t>(a.id);
      if (done_agent[i]) out.failures.push_back(describe(t, a.id, "entry after termination", 1, 0));
      const bool stall_now = r.reason == "stall" && !a.info.success;
      want("existence", -1.0);
      want("success", a.info.success ? 100.0 : 0.0);
      want("collision", a.info.collision ? -10.0 : 0.0);
      want("progress", d_prev[i] - a.info.d_goal);
      want("stall", stall_now ? -100000.0 : 0.0);

      double sum = 0.0;
      for (const auto& [name, v] : a.reward.terms) sum += v;
      if (std::abs(sum - a.reward.total) > 1e-9) out.failures.push_back(describe(t, a.id, "total", a.reward.total, sum));

      if (a.info.success) ++out.success_steps;
      if (a.info.collision) ++out.collision_steps;
      if (stall_now) ++out.stall_hits;
      if (a.id == 0) out.progress_total += d_prev[i] - a.info.d_goal;
      d_prev[i] = a.info.d_goal;
      if (a.terminated) done_agent[i] = true;
    }
  }
  out.reason = env.log().reason;
  if (out.success_steps != 1) out.failures.push_back("expected one success transition");
  if (out.collision_steps == 0) out.failures.push_back("expected collision steps");
  if (out.stall_hits != 1) out.failures.push_back("expected one stall penalty");
  if (out.reason != "stall") out.failures.push_back("expected stall termination, got " + out.reason);
  return out;
}

// Every agent issues STOP from rest; the episode has to end on step `window`.
inline Failures stall_failures(int window = 100, double delta = 0.5) {
  Failures f;
  EnvConfig cfg;
  cfg.scenarios = {generate(MiniGameKind::Doorway)};
  cfg.num_agents = {{0, 3}};
  cfg.stall_window = window;
  cfg.stall_delta = delta;
  Environment env(cfg);
  env.reset(0);
  StepResult last;
  while (!env.done()) {
    std::vector<std::pair<int, Action>> acts;
    for (int id : env.live_agents()) acts.emplace_back(id, Action::Stop);
    last = env.step(acts);
  }
  if (env.log().reason != "stall") f.push_back("reason " + env.log().reason);
  if (env.log().length != window) f.push_back("length " + std::to_string(env.log().length));
  if (last.agents.size() != 3) f.push_back("expected 3 live agents at the end");
  for (const auto& a : last.agents) {
    if (a.reward.term("stall") != -100000.0) f.push_back("agent " + std::to_string(a.id) + " missing stall penalty");
    if (!a.terminated) f.push_back("agent " + std::to_string(a.id) + " not terminated");
  }
  return f;
}

inline Failures schedule_failures() {
  Failures f;
  EnvConfig cfg;
  cfg.scenarios = {generate(MiniGameKind::Doorway)};
  cfg.num_agents = {{0, 3}, {35, 4}, {70, 5}};
  Environment env(cfg);
  for (auto [ep, k] : {std::pair{0, 3}, {34, 3}, {35, 4}, {69, 4}, {70, 5}, {500, 5}}) {
    env.reset(ep);
    if (env.num_agents() != k) {
      f.push_back("episode " + std::to_string(ep) + " -> " + std::to_string(env.num_agents()) + " agents");
    }
  }
  return f;
}

// Every constrained mini-game: a clean graph, and a common point for each of
// `episodes` sampled route sets with k cycling through the layout's range.
inline Failures geometric_failures(int episodes = 100) {
  Failures f;
  for (auto kind : {MiniGameKind::Doorway, MiniGameKind::Hallway, MiniGameKind::Intersection,
                    MiniGameKind::Roundabout}) {
    const auto game = generate(kind);
    const std::string name(to_string(kind));
    if (!validate_graph(game->map(), game->graph()).empty()) f.push_back(name + ": validate_graph violations");
    const int span = std::max(1, game->max_agents() - 1);
    for (int ep = 0; ep < episodes; ++ep) {
      const int k = 2 + ep % span;
      CounterRng rng = CounterRng(static_cast<std::uint64_t>(ep)).split(name);
      const auto routes = game->sample_agent_routes(k, rng);
      if (static_cast<int>(routes.size()) != k) f.push_back(name + ": wrong route count");
      if (!find_common_point(routes, game->graph())) {
        f.push_back(name + ": no common point in episode " + std::to_string(ep));
      }
      for (const auto& r : routes) {
        if (!validate_route(r, game->graph()).empty()) f.push_back(name + ": invalid route");
      }
    }
  }
  return f;
}

// A frozen batch for the default network on the Doorway observation layout.
// Old log-probabilities are jittered so some ratios sit outside the clip range.
inline GradCheckResult surrogate_gradient_check() {
  EnvConfig env_cfg;
  env_cfg.scenarios = {generate(MiniGameKind::Doorway)};
  const int dim = observation_size(env_cfg.observer);
  LearnerConfig cfg;
  ActorCritic model(dim, cfg, 3);
  CounterRng rng(77);
  std::vector<Sample> batch(64);
  for (auto& s : batch) {
    s.obs.resize(static_cast<std::size_t>(dim));
    for (auto& x : s.obs) x = rng.normal();
    s.action = static_cast<int>(rng.below(2));
    const auto z = model.logits(s.obs);
    const double m = std::max(z[0], z[1]);
    const double lse = m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
    s.logp = z[static_cast<std::size_t>(s.action)] - lse + rng.uniform(-0.3, 0.3);
    s.advantage = rng.normal();
  }
  return gradient_check(model.pi(), batch, cfg);
}

// Random desired commands pushed through clamp_command + integrate for every
// drive type; any step that breaks a speed or rate limit is reported.
inline Failures kinematic_limit_failures(int sequences = 10000, int length = 20) {
  Failures f;
  CounterRng rng(2024);
  const double dt = 0.1, tol = 1e-9;
  for (int n = 0; n < sequences; ++n) {
    KinodynamicConfig cfg;
    cfg.drive_type = static_cast<DriveType>(n % 3);
    AgentState s;
    s.pose.psi = rng.uniform(-3, 3);
    for (int t = 0; t < length; ++t) {
      const MotionCommand want{rng.uniform(-4, 4), rng.uniform(-6, 6), {rng.uniform(-4, 4), rng.uniform(-4, 4)}};
      const MotionCommand c = clamp_command(s, want, cfg, dt);
      const AgentState next = integrate(s, c, cfg, dt);
      bool ok = true;
      if (cfg.drive_type == DriveType::Omni) {
        ok = std::abs(c.v_vec.x) <= cfg.v_max + tol && std::abs(c.v_vec.y) <= cfg.v_max + tol &&
             std::abs(c.v_vec.x - s.vel.x) <= cfg.a_max * dt + tol &&
             std::abs(c.v_vec.y - s.vel.y) <= cfg.a_max * dt + tol;
      } else {
        ok = std::abs(c.v) <= cfg.v_max + tol && std::abs(c.omega) <= cfg.omega_max + tol &&
             std::abs(c.v - s.v) <= cfg.a_max * dt + tol && std::abs(c.omega - s.omega) <= cfg.alpha_max * dt + tol;
        if (cfg.drive_type == DriveType::Ackermann && std::abs(c.omega) > cfg.omega_limit_at(c.v) + tol) {
          // only allowed while the steering is still unwinding at its rate limit
          ok = ok && std::abs(c.omega - s.omega) >= cfg.alpha_max * dt - tol;
        }
      }
      if (!ok || !std::isfinite(next.pose.x) || !std::isfinite(next.pose.y)) {
        f.push_back("sequence " + std::to_string(n) + " step " + std::to_string(t) + " (" +
                    std::string(to_string(cfg.drive_type)) + ")");
        break;
      }
      s = next;
    }
    if (f.size() > 5) break;
  }
  return f;
}

// Largest err / dt^2 between one-second rollouts at dt and dt/2 under
// constant feasible commands.
inline double refinement_constant() {
  CounterRng rng(99);
  KinodynamicConfig cfg;
  double worst = 0.0;
  for (double dt : {0.2, 0.1, 0.05}) {
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < 500; ++i) {
      const MotionCommand c{rng.uniform(-cfg.v_max, cfg.v_max), rng.uniform(-cfg.omega_max, cfg.omega_max), {}};
      AgentState a, b;
      a.pose.psi = b.pose.psi = rng.uniform(-3, 3);
      a.v = b.v = c.v;
      a.omega = b.omega = c.omega;
      for (int k = 0; k < steps; ++k) a = integrate(a, c, cfg, dt);
      for (int k = 0; k < 2 * steps; ++k) b = integrate(b, c, cfg, dt / 2);
      worst = std::max(worst, distance(a.pose.position(), b.pose.position()) / (dt * dt));
    }
  }
  return worst;
}

struct SocketPair {
  int server = -1;
  int client = -1;
  SocketPair() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) throw std::runtime_error("socketpair failed");
    server = fds[0];
    client = fds[1];
  }
};

// Only Local driven over the wire vs. in process, same config and episodes.
inline Failures wire_equivalence_failures(int episodes = 3, int k = 3) {
  Failures f;
  EnvConfig cfg;
  cfg.scenarios = {generate(MiniGameKind::Doorway)};
  cfg.num_agents = {{0, k}};
  cfg.seed = 5;

  SocketPair sp;
  ServeResult served;
  std::thread server([&] {
    LineChannel ch(sp.server, sp.server, true);
    ServeOptions opts;
    opts.episodes = episodes;
    served = serve(cfg, ch, opts);
  });
  int ended = 0;
  {
    LineChannel ch(sp.client, sp.client, true);
    try {
      ended = run_controller(ch, [](int, const std::vector<double>&) { return Action::Go; }, "only_local");
    } catch (const std::exception& e) {
      f.push_back(std::string("controller: ") + e.what());
    }
  }
  server.join();
  if (!served.error.empty()) f.push_back("server: " + served.error);
  if (ended != episodes) f.push_back("controller saw " + std::to_string(ended) + " episode ends");
  if (static_cast<int>(served.logs.size()) != episodes) return f.push_back("missing logs"), f;

  Environment env(cfg);
  OnlyLocalPolicy local;
  for (int e = 0; e < episodes; ++e) {
    const std::string in_process = run_episode(env, local, e).to_jsonl();
    if (served.logs[static_cast<std::size_t>(e)].to_jsonl() != in_process) {
      f.push_back("episode " + std::to_string(e) + " logs differ");
    }
  }
  return f;
}

}  // namespace minisocial::testing
