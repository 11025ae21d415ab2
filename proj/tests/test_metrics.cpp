#include <algorithm>
#include <stdexcept>

#include "doctest.h"
#include "minisocial/episode_log.hpp"
#include "minisocial/geometry_io.hpp"
#include "minisocial/metrics.hpp"

using namespace minisocial;

namespace {

const std::string kData = MINISOCIAL_TEST_DATA;

// k agents moving at `speed`, all succeeding on the record with index `succ_at`.
EpisodeLog synthetic(int k, int length, int succ_at, double speed) {
  EpisodeLog log;
  log.scenario = "doorway";
  log.policy = "scripted";
  log.k = k;
  for (int t = 0; t < length; ++t) {
    LogStep s;
    s.t = t;
    for (int i = 0; i < k; ++i) {
      LogAgentStep a;
      a.id = i;
      a.succ = t >= succ_at;
      a.v = a.succ ? 0.0 : speed;
      s.agents.push_back(a);
    }
    log.steps.push_back(s);
  }
  log.reason = "success";
  log.length = length;
  return log;
}

}  // namespace

TEST_CASE("hand-computed two-episode oracle") {
  const auto logs = parse_episode_logs(read_text_file(kData + "/metrics_two_episodes.jsonl"));
  REQUIRE(logs.size() == 2);
  const auto want = parse_metrics_csv(read_text_file(kData + "/metrics_two_episodes.expected.csv"));
  REQUIRE(want.size() == 1);
  const auto got = compute_metrics(logs);
  CHECK(got == want[0]);
  CHECK(got.success == 50.0);
  CHECK(got.partial_success == 75.0);
  CHECK(got.stop_time == 0.75);
  CHECK(got.max_dv == 75.0);
  CHECK(collision_events(logs[0]) == 2);
  CHECK(collision_events(logs[1]) == 2);
}

TEST_CASE("both agents succeed at step 100 without stopping") {
  const std::vector<EpisodeLog> logs{synthetic(2, 100, 99, 1.0)};
  const auto r = compute_metrics(logs);
  CHECK(r.success == 100.0);
  CHECK(r.partial_success == 100.0);
  CHECK(r.avg_length == 100.0);
  CHECK(r.coll_rate == 0.0);
  CHECK(r.stop_time == 0.0);
  CHECK(r.trials == 1);
}

TEST_CASE("stop time counts sub-threshold records") {
  EpisodeLog log = synthetic(1, 5, 99, 0.0);
  const double v[] = {0, 0, 1, 1, 0};
  for (int t = 0; t < 5; ++t) log.steps[static_cast<std::size_t>(t)].agents[0].v = v[t];
  const std::vector<EpisodeLog> logs{log};
  CHECK(compute_metrics(logs).stop_time == 3.0);
}

TEST_CASE("metrics are order independent and bounded") {
  auto logs = parse_episode_logs(read_text_file(kData + "/metrics_two_episodes.jsonl"));
  logs.push_back(synthetic(2, 7, 3, 0.3));
  const auto a = compute_metrics(logs);
  std::reverse(logs.begin(), logs.end());
  CHECK(compute_metrics(logs) == a);
  CHECK(a.success <= a.partial_success);
  CHECK_THROWS_AS(compute_metrics(std::vector<EpisodeLog>{}), std::invalid_argument);
}

TEST_CASE("csv round trip and shape") {
  std::vector<MetricsRow> rows;
  for (int k : {3, 4, 5, 7, 10}) {
    rows.push_back({"doorway", "only_local", k, 25, 100.0 / 3.0, 0.1 + 0.2, 123.456, 0.04, 1e-7, 13.5});
  }
  const std::string csv = metrics_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(parse_metrics_csv(csv) == rows);
  CHECK(metrics_csv({}) == std::string(kMetricsCsvHeader) + "\n");
  CHECK(parse_metrics_csv(metrics_csv({})).empty());
  CHECK_THROWS_AS(parse_metrics_csv("a,b\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_metrics_csv(std::string(kMetricsCsvHeader) + "\nx,y,3\n"), std::runtime_error);
}

TEST_CASE("table has one line per row plus a header") {
  const std::vector<MetricsRow> rows{{"doorway", "only_local", 3, 25, 48, 70, 120.5, 0.2, 3.1, 40}};
  const std::string t = metrics_table(rows);
  CHECK(std::count(t.begin(), t.end(), '\n') == 2);
  CHECK(t.find("48.00") != std::string::npos);
}
