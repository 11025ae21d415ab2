#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "minisocial/normalizer.hpp"
#include "minisocial/observation.hpp"
#include "minisocial/reward.hpp"
#include "minisocial/rng.hpp"

using namespace minisocial;

namespace {

AgentView agent(int id, Vec2 p, double psi = 0.0, double d_goal = 5.0) {
  AgentView a;
  a.id = id;
  a.state.pose = {p.x, p.y, psi};
  a.state.d_goal = d_goal;
  return a;
}

WorldSnapshot world_of(std::vector<AgentView> agents) {
  WorldSnapshot w;
  w.agents = std::move(agents);
  return w;
}

RewarderConfig scheduled_collision(std::int64_t duration) {
  RewarderConfig c = default_rewarder_config();
  for (auto& t : c.terms) {
    if (t.kind == RewardKind::Collision) t.schedule_duration = duration;
  }
  return c;
}

}  // namespace

TEST_CASE("single agent gets zero-padded neighbour slots") {
  ObserverConfig cfg;
  cfg.max_neighbors = 3;
  const auto f = observe(0, world_of({agent(0, {1, 2})}), cfg);
  CHECK(static_cast<int>(f.vector.size()) == observation_size(cfg));
  const auto* present = f.field("OtherAgentObservables.present");
  REQUIRE(present);
  CHECK(*present == std::vector<double>{0, 0, 0});
  const auto* dx = f.field("OtherAgentObservables.dx");
  CHECK(*dx == std::vector<double>{0, 0, 0});
}

TEST_CASE("neighbour straight ahead sits at (1, 0) in the observer frame") {
  ObserverConfig cfg;
  const double psi = 0.7;
  const Vec2 o{2, -1};
  const auto w = world_of({agent(0, o, psi), agent(1, o + Vec2{std::cos(psi), std::sin(psi)})});
  const auto f = observe(0, w, cfg);
  CHECK((*f.field("OtherAgentObservables.dx"))[0] == doctest::Approx(1.0));
  CHECK((*f.field("OtherAgentObservables.dy"))[0] == doctest::Approx(0.0).epsilon(1e-12));

  cfg.other_poses_ignore_theta = true;
  const auto g = observe(0, w, cfg);
  CHECK((*g.field("OtherAgentObservables.dx"))[0] == doctest::Approx(std::cos(psi)));
  CHECK((*g.field("OtherAgentObservables.dy"))[0] == doctest::Approx(std::sin(psi)));
}

TEST_CASE("other goal distance adds exactly K scalars") {
  ObserverConfig cfg;
  cfg.max_neighbors = 4;
  const int base = observation_size(cfg);
  cfg.set_other_goal_dist(true);
  CHECK(observation_size(cfg) == base + 4);
  const auto w = world_of({agent(0, {0, 0}), agent(1, {1, 0}, 0, 7.5)});
  const auto f = observe(0, w, cfg);
  CHECK(static_cast<int>(f.vector.size()) == base + 4);
  CHECK((*f.field("OtherAgentGoalDist.d_goal"))[0] == 7.5);
}

TEST_CASE("removing a component only removes its slice") {
  ObserverConfig full;
  full.max_neighbors = 2;
  const auto w = world_of({agent(0, {0, 0}, 0.3), agent(1, {1, 1}), agent(2, {-2, 0.5})});
  const auto all = observe(0, w, full).vector;
  const auto layout = observation_layout(full);
  for (std::size_t drop = 0; drop < full.components.size(); ++drop) {
    ObserverConfig cut = full;
    cut.components.erase(cut.components.begin() + static_cast<std::ptrdiff_t>(drop));
    const auto part = observe(0, w, cut).vector;
    std::vector<double> expect;
    std::size_t off = 0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const auto n = static_cast<std::size_t>(layout[i].second);
      if (i != drop) expect.insert(expect.end(), all.begin() + static_cast<std::ptrdiff_t>(off),
                                   all.begin() + static_cast<std::ptrdiff_t>(off + n));
      off += n;
    }
    CHECK(part == expect);
  }
}

TEST_CASE("nearest neighbours match brute force") {
  CounterRng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(19));
    std::vector<AgentView> as;
    for (int i = 0; i < n; ++i) {
      // a coarse grid makes distance ties common
      as.push_back(agent(i, {std::round(rng.uniform(-4, 4)), std::round(rng.uniform(-4, 4))}));
    }
    const auto w = world_of(as);
    const int k = static_cast<int>(rng.below(10));
    const int self = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    std::vector<std::pair<double, int>> all;
    for (const auto& a : as) {
      if (a.id != self) all.emplace_back(distance(a.state.pose.position(), as[self].state.pose.position()), a.id);
    }
    std::sort(all.begin(), all.end());
    std::vector<int> want;
    for (int i = 0; i < std::min<int>(k, static_cast<int>(all.size())); ++i) want.push_back(all[i].second);
    CHECK(nearest_neighbors(self, w, k) == want);
  }
}

TEST_CASE("reward examples") {
  const RewarderConfig cfg = default_rewarder_config();
  auto before = world_of({agent(0, {0, 0}, 0, 5.0)});
  auto after = world_of({agent(0, {0.1, 0}, 0, 4.9)});
  auto r = reward(0, before, after, {}, cfg, 0);
  CHECK(r.total == doctest::Approx(-0.9).epsilon(1e-12));

  before = world_of({agent(0, {0, 0}, 0, 0.6)});
  after = world_of({agent(0, {0.2, 0}, 0, 0.4)});
  after.agents[0].succeeded = true;
  r = reward(0, before, after, {}, cfg, 0);
  CHECK(r.term("success") == 100.0);
  CHECK(r.total == doctest::Approx(99.2).epsilon(1e-12));

  before = world_of({agent(0, {0, 0}, 0, 3.0)});
  after = before;
  r = reward(0, before, after, {.collided = true}, scheduled_collision(10000), 5000);
  CHECK(r.term("collision") == -5.0);
  r = reward(0, before, after, {.collided = true}, scheduled_collision(10000), 20000);
  CHECK(r.term("collision") == -10.0);
}

TEST_CASE("reward total equals term sum") {
  CounterRng rng(5);
  RewarderConfig cfg = default_rewarder_config();
  cfg.terms.push_back({RewardKind::Proximity, -0.1, std::nullopt, 0.2, true});
  cfg.terms.push_back({RewardKind::SubGoal, 25.0, 300, 0.2, true});
  for (int i = 0; i < 500; ++i) {
    auto before = world_of({agent(0, {0, 0}, 0, rng.uniform(0, 20)), agent(1, {rng.uniform(0, 1), 0})});
    auto after = world_of({agent(0, {0.1, 0}, 0, rng.uniform(0, 20)), agent(1, {rng.uniform(0, 1), 0})});
    after.agents[0].succeeded = rng.below(2) == 1;
    const RewardEvents ev{rng.below(2) == 1, rng.below(2) == 1, rng.below(2) == 1};
    const auto r = reward(0, before, after, ev, cfg, static_cast<std::int64_t>(rng.below(600)));
    double sum = 0.0;
    for (const auto& [name, v] : r.terms) sum += v;
    CHECK(std::abs(r.total - sum) <= 1e-9);
  }
  CHECK_THROWS_AS(reward(3, world_of({agent(0, {})}), world_of({agent(0, {})}), {}, cfg, 0), std::invalid_argument);
}

TEST_CASE("normalizer: constant stream goes to zero") {
  Normalizer n(2);
  std::vector<double> out;
  for (int i = 0; i < 50; ++i) out = n.observation(std::vector<double>{3.0, -1.0});
  CHECK(out[0] == doctest::Approx(0.0));
  CHECK(out[1] == doctest::Approx(0.0));
}

TEST_CASE("normalizer: alternating +-1 by hand") {
  Normalizer n(1);
  for (int i = 0; i < 10; ++i) n.observation(std::vector<double>{i % 2 == 0 ? 1.0 : -1.0});
  // ten samples, five of each sign: mean 0, population variance 1
  CHECK(n.obs_stats().mean()[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(n.obs_stats().variance()[0] == doctest::Approx(1.0));
  CHECK(n.observation_frozen(std::vector<double>{1.0})[0] == doctest::Approx(1.0));
  CHECK(n.observation_frozen(std::vector<double>{-1.0})[0] == doctest::Approx(-1.0));
}

TEST_CASE("normalizer: eval mode freezes statistics") {
  Normalizer n(1);
  for (double x : {1.0, 2.0, 4.0}) n.observation(std::vector<double>{x});
  n.reward(0, 1.0);
  n.set_training(false);
  const auto mean = n.obs_stats().mean();
  const auto count = n.return_stats().count();
  for (int i = 0; i < 20; ++i) {
    n.observation(std::vector<double>{100.0});
    n.reward(0, 50.0);
  }
  CHECK(n.obs_stats().mean() == mean);
  CHECK(n.return_stats().count() == count);
}

TEST_CASE("normalizer clips") {
  Normalizer n(1);
  for (int i = 0; i < 100; ++i) n.observation(std::vector<double>{i % 2 ? 0.01 : -0.01});
  CHECK(n.observation_frozen(std::vector<double>{1e6})[0] == 10.0);
  Normalizer r(1);
  for (int i = 0; i < 100; ++i) r.reward(0, 0.001);
  CHECK(r.reward(0, -1e9) == -10.0);
}

TEST_CASE("observer config validation") {
  ObserverConfig c;
  c.max_neighbors = -1;
  CHECK_THROWS(c.validate());
  c = ObserverConfig{};
  c.components.clear();
  CHECK_THROWS(c.validate());
}
