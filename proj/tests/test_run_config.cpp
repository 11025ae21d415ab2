#include <algorithm>

#include "doctest.h"
#include "minisocial/baselines.hpp"
#include "minisocial/config_error.hpp"
#include "minisocial/geometry_io.hpp"
#include "minisocial/run_config.hpp"

using namespace minisocial;

namespace {

const std::string kData = MINISOCIAL_TEST_DATA;

bool mentions(const std::vector<std::string>& ws, const std::string& needle) {
  return std::any_of(ws.begin(), ws.end(), [&](const std::string& w) { return w.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("classic keys are accepted verbatim") {
  const RunConfig rc = load_run_config(kData + "/listing_config.json");
  CHECK(rc.num_agents == std::vector<std::pair<std::int64_t, int>>{{0, 3}, {35, 4}, {70, 5}});
  CHECK(rc.eval_num_agents == std::vector<int>{3, 4, 5, 7, 10});
  CHECK(rc.train_length == 1250000);
  CHECK(rc.run_type == "AO");
  CHECK(rc.entropy_constant_penalty == -100000.0);
  CHECK(mentions(rc.warnings, "device"));
  CHECK(mentions(rc.warnings, "n_steps"));

  const EnvConfig env = rc.env_config();
  CHECK(env.order_mode == OrderMode::AnyOrder);
  CHECK(env.observer.agent_pose_ignore_theta);
  CHECK(env.agents_for_episode(35) == 4);
  const LearnerConfig lc = rc.learner_config();
  CHECK(lc.learning_rate == 0.0003);
  CHECK(lc.minibatch == 64);
}

TEST_CASE("round trip is the identity") {
  const RunConfig rc = load_run_config(kData + "/listing_config.json");
  const json once = rc.to_json();
  const RunConfig back = RunConfig::from_json(once);
  CHECK(back.to_json() == once);
  CHECK(RunConfig::from_json(RunConfig{}.to_json()).to_json() == RunConfig{}.to_json());
}

TEST_CASE("unknown keys are rejected with their path") {
  json j = RunConfig{}.to_json();
  j["num_agentz"] = 3;
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("num_agentz"), ConfigError);
  j = RunConfig{}.to_json();
  j["planner"]["horizon_s"] = 1;
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("horizon_s"), ConfigError);
  j = RunConfig{}.to_json();
  j["train_length"] = "long";
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
}

TEST_CASE("bad values fail at env_config") {
  RunConfig rc;
  rc.num_agents = {{3, 2}};
  CHECK_THROWS_AS(rc.env_config(), ConfigError);
  rc = RunConfig{};
  rc.experiment_names = {"envs_nowhere"};
  CHECK_THROWS_AS(rc.env_config(), ConfigError);
  rc = RunConfig{};
  rc.run_type = "XYZ";
  CHECK_THROWS_AS(rc.env_config(), ConfigError);
  CHECK_THROWS_AS(load_run_config(kData + "/does_not_exist.json"), ConfigError);
}

TEST_CASE("stall penalty keys feed the stall term") {
  RunConfig rc;
  rc.entropy_constant_penalty = -500;
  rc.entropy_constant_penalty_only_not_finish = false;
  const EnvConfig env = rc.env_config();
  bool found = false;
  for (const auto& t : env.rewarder.terms) {
    if (t.kind != RewardKind::Stall) continue;
    found = true;
    CHECK(t.weight == -500);
    CHECK_FALSE(t.only_unfinished);
  }
  CHECK(found);
}

TEST_CASE("scenario files resolve relative to the config") {
  RunConfig rc;
  rc.base_dir = std::string(MINISOCIAL_SOURCE_DIR) + "/data";
  rc.experiment_names = {"doorway.scenario.json"};
  const auto set = rc.scenarios();
  REQUIRE(set.size() == 1);
  CHECK(set[0]->max_agents() >= 2);
}
