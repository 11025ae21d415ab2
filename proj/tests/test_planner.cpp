#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "minisocial/planner.hpp"
#include "minisocial/rng.hpp"

using namespace minisocial;

namespace {

AgentState at_rest(double x, double y, double psi) {
  AgentState s;
  s.pose = {x, y, psi};
  return s;
}

// straight east-west line: 1 -> 2 -> 3
NavGraph line_graph() {
  NavGraph g("line");
  g.add_node(1, {0, 0});
  g.add_node(2, {5, 0});
  g.add_node(3, {10, 0});
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  return g;
}

bool within_limits(const AgentState& s, const MotionCommand& c, const KinodynamicConfig& cfg, double dt) {
  const double tol = 1e-9;
  return std::abs(c.v) <= cfg.v_max + tol && std::abs(c.omega) <= cfg.omega_max + tol &&
         std::abs(c.v - s.v) <= cfg.a_max * dt + tol && std::abs(c.omega - s.omega) <= cfg.alpha_max * dt + tol;
}

}  // namespace

TEST_CASE("is_blocked boundary") {
  CandidateTrajectory t;
  t.clearance = 0.0;
  CHECK(is_blocked(t, 0.3, 0.05));
  t.clearance = 1.0;
  CHECK_FALSE(is_blocked(t, 0.3, 0.05));
  t.clearance = 0.34;
  CHECK(is_blocked(t, 0.3, 0.05));
}

TEST_CASE("STOP decelerates by a_max*dt") {
  KinodynamicConfig cfg;
  AgentState s = at_rest(0, 0, 0);
  s.v = s.speed = 1.0;
  s.vel = {1.0, 0.0};
  const auto g = line_graph();
  const Route r{{1, 2, 3}};
  const auto cmd = plan_step(s, Action::Stop, r, g, {}, {}, cfg, PlannerParams{}, 0.1);
  CHECK(cmd.v == doctest::Approx(0.8));
}

TEST_CASE("GO in open space goes straight and ramps up") {
  KinodynamicConfig cfg;
  const PlannerParams params;
  const auto g = line_graph();
  const Route r{{1, 2, 3}};
  AgentState s = at_rest(0, 0, 0);
  s.route_progress = 1;
  const auto cmd = plan_step(s, Action::Go, r, g, {}, {}, cfg, params, 0.1);
  CHECK(cmd.omega == doctest::Approx(0.0));
  CHECK(cmd.v == doctest::Approx(0.2));
}

TEST_CASE("wall 0.2 m ahead blocks every candidate") {
  KinodynamicConfig cfg;  // radius 0.3
  const PlannerParams params;
  const std::vector<Segment> walls{{{0.2, -5}, {0.2, 5}}};
  const AgentState s = at_rest(0, 0, 0);
  const auto cands = sample_candidates(s, {5, 0}, walls, {}, cfg, params, 0.1);
  REQUIRE(cands.size() == 21);
  // From rest the fastest rollout covers 0.2 m per second of horizon, and the
  // body starts 0.2 m from the wall, so no arc can reach 0.35 m clearance.
  for (const auto& c : cands) {
    CHECK(c.clearance <= 0.2 + 1e-12);
    CHECK(is_blocked(c, cfg.radius, params.safety_margin));
  }
  CHECK(select_candidate(cands, cfg.radius, params.safety_margin) == -1);

  const auto g = line_graph();
  AgentState s1 = s;
  s1.route_progress = 1;
  const auto cmd = plan_step(s1, Action::Go, Route{{1, 2, 3}}, g, walls, {}, cfg, params, 0.1);
  CHECK(cmd == stop_command(s1, cfg, 0.1));
}

TEST_CASE("select_candidate prefers score then smaller |omega|") {
  std::vector<CandidateTrajectory> c(3);
  for (auto& x : c) x.clearance = 1.0;
  c[0].score = 1.0, c[0].tie_key = 0.4;
  c[1].score = 1.0, c[1].tie_key = 0.1;
  c[2].score = 0.9, c[2].tie_key = 0.0;
  CHECK(select_candidate(c, 0.3, 0.05) == 1);
  c[2].score = 1.2;
  c[2].clearance = 0.1;
  CHECK(select_candidate(c, 0.3, 0.05) == 1);
}

TEST_CASE("predicted poses span the horizon") {
  KinodynamicConfig cfg;
  const PlannerParams params;
  const auto cands = sample_candidates(at_rest(0, 0, 0), {5, 0}, {}, {}, cfg, params, 0.1);
  for (const auto& c : cands) {
    CHECK(c.predicted_poses.size() == 10);
    CHECK(c.clearance >= 0.0);
  }
}

TEST_CASE("advance_waypoint examples") {
  const auto g = line_graph();
  const Route r{{1, 2, 3}};
  auto u = advance_waypoint({5, 0}, 1, r, g, 0.5);
  CHECK(u.route_progress == 2);
  CHECK(u.d_goal == doctest::Approx(5.0));

  u = advance_waypoint({-5, 0}, 1, r, g, 0.5);
  CHECK(u.route_progress == 1);
  CHECK(u.d_goal == doctest::Approx(15.0));

  u = advance_waypoint({10, 0}, 2, r, g, 0.5);
  CHECK(u.route_progress == 2);
  CHECK(u.d_goal == 0.0);
}

TEST_CASE("repeated STOP reaches rest in ceil(v_max/(a_max dt)) steps") {
  KinodynamicConfig cfg;
  const double dt = 0.1;
  const auto g = line_graph();
  const Route r{{1, 2, 3}};
  AgentState s = at_rest(0, 0, 0.3);
  s.v = s.speed = cfg.v_max;
  s.omega = 1.0;
  s.vel = Vec2{std::cos(0.3), std::sin(0.3)} * cfg.v_max;
  const int bound = static_cast<int>(std::ceil(cfg.v_max / (cfg.a_max * dt)));
  for (int i = 0; i < bound + 20; ++i) {
    const auto cmd = plan_step(s, Action::Stop, r, g, {}, {}, cfg, PlannerParams{}, dt);
    CHECK(within_limits(s, cmd, cfg, dt));
    s = integrate(s, cmd, cfg, dt);
    if (i + 1 >= bound) CHECK(s.v == 0.0);
  }
}

TEST_CASE("repeated GO converges on heading and speed") {
  KinodynamicConfig cfg;
  const PlannerParams params;
  const double dt = 0.1;
  NavGraph g("far");
  g.add_node(1, {0, 0});
  g.add_node(2, {60, 30});
  g.add_edge(1, 2);
  const Route r{{1, 2}};
  AgentState s = at_rest(0, 0, -1.0);
  s.route_progress = 1;
  for (int i = 0; i < 80; ++i) {
    const auto cmd = plan_step(s, Action::Go, r, g, {}, {}, cfg, params, dt);
    CHECK(within_limits(s, cmd, cfg, dt));
    s = integrate(s, cmd, cfg, dt);
  }
  const Vec2 to_goal = Vec2{60, 30} - s.pose.position();
  CHECK(std::abs(wrap_angle(std::atan2(to_goal.y, to_goal.x) - s.pose.psi)) < 0.1);
  CHECK(std::abs(s.v - cfg.v_pref) <= cfg.a_max * dt + 1e-9);
}

TEST_CASE("plan_step stays within limits near obstacles") {
  CounterRng rng(4);
  KinodynamicConfig cfg;
  const PlannerParams params;
  const auto g = line_graph();
  const Route r{{1, 2, 3}};
  const std::vector<Segment> walls{{{-2, 1}, {12, 1}}, {{-2, -1}, {12, -1}}};
  for (int i = 0; i < 300; ++i) {
    AgentState s = at_rest(rng.uniform(0, 10), rng.uniform(-0.6, 0.6), rng.uniform(-3, 3));
    s.v = s.speed = rng.uniform(0, cfg.v_max);
    s.omega = rng.uniform(-cfg.omega_max, cfg.omega_max);
    s.vel = Vec2{std::cos(s.pose.psi), std::sin(s.pose.psi)} * s.v;
    s.route_progress = 1 + rng.below(2);
    const std::vector<Disc> others{{{rng.uniform(0, 10), rng.uniform(-1, 1)}, 0.3}};
    const auto a = rng.below(2) ? Action::Go : Action::Stop;
    const auto cmd = plan_step(s, a, r, g, walls, others, cfg, params, 0.1);
    CHECK(within_limits(s, cmd, cfg, 0.1));
    CHECK(cmd == plan_step(s, a, r, g, walls, others, cfg, params, 0.1));
  }
}

TEST_CASE("action names") {
  CHECK(to_string(Action::Go) == "GO");
  CHECK(action_from_string("STOP") == Action::Stop);
  CHECK_THROWS_AS(action_from_string("go"), std::invalid_argument);
}
