#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "minisocial/human_sim.hpp"
#include "minisocial/rng.hpp"

using namespace minisocial;

namespace {

HumanState pedestrian(Vec2 p, Vec2 goal, Vec2 v = {}) {
  HumanState h;
  h.position = p;
  h.goal = goal;
  h.velocity = v;
  return h;
}

}  // namespace

TEST_CASE("goal force from rest") {
  const auto f = social_force(pedestrian({0, 0}, {10, 0}), {}, {}, SocialForceParams{});
  CHECK(f.x == doctest::Approx(2.68));
  CHECK(f.y == 0.0);
}

TEST_CASE("equilibrium at v_pref") {
  const SocialForceParams p;
  const auto h = pedestrian({0, 0}, {10, 0}, {1.34, 0});
  const auto f = social_force(h, {}, {}, p);
  CHECK(f.x == doctest::Approx(0.0));
  CHECK(f.y == 0.0);

  const std::vector<HumanState> one{h};
  const auto next = step_humans(one, {}, {}, p, 0.1);
  CHECK(next[0].position.x == doctest::Approx(0.134));
  CHECK(next[0].position.y == 0.0);
}

TEST_CASE("pairwise repulsion is antisymmetric") {
  CounterRng rng(3);
  SocialForceParams p;
  for (int i = 0; i < 200; ++i) {
    const Vec2 mid{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Vec2 off{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    // goal at own position cancels the goal term, isolating the interaction
    auto a = pedestrian(mid + off, mid + off);
    auto b = pedestrian(mid - off, mid - off);
    const std::vector<Neighbor> na{{b.position, b.velocity, b.radius}};
    const std::vector<Neighbor> nb{{a.position, a.velocity, a.radius}};
    const Vec2 fa = social_force(a, na, {}, p);
    const Vec2 fb = social_force(b, nb, {}, p);
    CHECK(std::abs(fa.x + fb.x) <= 1e-9);
    CHECK(std::abs(fa.y + fb.y) <= 1e-9);
  }
}

TEST_CASE("free-space relaxation within three tau") {
  const SocialForceParams p;
  const double dt = 0.1;
  std::vector<HumanState> hs{pedestrian({0, 0}, {100, 0})};
  const int n = static_cast<int>(std::round(3 * p.tau / dt));
  for (int i = 0; i < n; ++i) hs = step_humans(hs, {}, {}, p, dt);
  const double speed = hs[0].velocity.norm();
  CHECK(speed >= 0.95 * p.v_pref);
  const double closed_form = p.v_pref * (1.0 - std::exp(-3.0));
  CHECK(std::abs(speed - closed_form) <= 0.05 * closed_form);
}

TEST_CASE("speed cap holds under strong pushes") {
  CounterRng rng(8);
  const SocialForceParams p;
  const std::vector<Segment> walls{{{-10, 1}, {10, 1}}, {{-10, -1}, {10, -1}}};
  std::vector<HumanState> hs;
  for (int i = 0; i < 8; ++i) {
    hs.push_back(pedestrian({rng.uniform(-3, 3), rng.uniform(-0.8, 0.8)}, {rng.uniform(-9, 9), 0}));
  }
  for (int t = 0; t < 200; ++t) {
    hs = step_humans(hs, {}, walls, p, 0.1);
    for (const auto& h : hs) {
      CHECK(h.velocity.norm() <= p.speed_cap_factor * h.v_pref + 1e-12);
      CHECK(h.position.finite());
    }
  }
}

TEST_CASE("pedestrian at goal holds position") {
  const std::vector<HumanState> hs{pedestrian({3, 3}, {3.2, 3}, {0.5, 0})};
  const auto next = step_humans(hs, {}, {}, SocialForceParams{}, 0.1);
  CHECK(next[0].position == hs[0].position);
  CHECK(next[0].velocity == Vec2{});
}

TEST_CASE("update is order independent") {
  const SocialForceParams p;
  std::vector<HumanState> hs{pedestrian({0, 0}, {5, 0}), pedestrian({0.6, 0.1}, {-5, 0}),
                             pedestrian({0.2, 0.7}, {0, -5})};
  const std::vector<Neighbor> robots{{{0.5, -0.5}, {}, 0.3}};
  const auto a = step_humans(hs, robots, {}, p, 0.1);
  std::vector<HumanState> rev(hs.rbegin(), hs.rend());
  const auto b = step_humans(rev, robots, {}, p, 0.1);
  for (std::size_t i = 0; i < hs.size(); ++i) {
    CHECK(a[i].position.x == doctest::Approx(b[hs.size() - 1 - i].position.x).epsilon(1e-12));
    CHECK(a[i].position.y == doctest::Approx(b[hs.size() - 1 - i].position.y).epsilon(1e-12));
  }
}

TEST_CASE("parameter validation") {
  SocialForceParams p;
  CHECK_NOTHROW(p.validate());
  p.tau = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
