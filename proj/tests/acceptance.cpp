// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.
// `--quick` skips the training run (it dominates the runtime); `--report FILE`
// also writes the lines to FILE.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "minisocial/geometry_io.hpp"
#include "minisocial/human_sim.hpp"
#include "minisocial/metrics.hpp"
#include "support.hpp"

using namespace minisocial;
using minisocial::testing::Failures;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome from_failures(const Failures& f, const std::string& ok_detail) {
  if (f.empty()) return {true, ok_detail};
  std::string d = f.front();
  if (f.size() > 1) d += " (+" + std::to_string(f.size() - 1) + " more)";
  return {false, d};
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f%%", v);
  return buf;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "minisocial_acceptance_det";
  fs::remove_all(root);
  std::vector<std::string> logs, csvs;
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    const std::string cmd = "MINISOCIAL_LOG_DIR='" + dir.string() + "' '" + MINISOCIAL_CLI +
                            "' eval --seed 7 --trials 5 --k 3 4 > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "eval exited non-zero"};
    logs.push_back(read_text_file(dir / "door/ao/eval_only_local.jsonl"));
    csvs.push_back(read_text_file(dir / "door/ao/metrics.csv"));
  }
  if (logs[0] != logs[1]) return {false, "episode logs differ"};
  if (csvs[0] != csvs[1]) return {false, "metrics csv differs"};
  return {true, std::to_string(logs[0].size()) + " log bytes and the CSV match"};
}

Outcome reward_constants() {
  const auto s = minisocial::testing::run_reward_trace();
  return from_failures(s.failures, "success, collision x" + std::to_string(s.collision_steps) +
                                       ", existence, progress and stall terms exact");
}

Outcome dynamics() {
  Failures f = minisocial::testing::kinematic_limit_failures(10000);
  const KinodynamicConfig cfg;
  const double c = minisocial::testing::refinement_constant();
  if (c > cfg.v_max * cfg.omega_max) f.push_back("refinement constant " + std::to_string(c));
  const auto g = minisocial::testing::surrogate_gradient_check();
  if (g.fraction() < 0.95) f.push_back("gradient check " + std::to_string(g.fraction()));
  char buf[160];
  std::snprintf(buf, sizeof buf, "1e4 sequences in limits; C = %.3f <= %.1f; gradient %zu/%zu params within 1e-3", c,
                cfg.v_max * cfg.omega_max, g.within_tolerance, g.params);
  return from_failures(f, buf);
}

Outcome social_forces() {
  const SocialForceParams p;
  const double dt = 0.1;
  HumanState h;
  h.goal = {100, 0};
  std::vector<HumanState> hs{h};
  for (int i = 0; i < static_cast<int>(std::lround(3 * p.tau / dt)); ++i) hs = step_humans(hs, {}, {}, p, dt);
  const double speed = hs[0].velocity.norm();
  const double closed = p.v_pref * (1.0 - std::exp(-3.0));
  Failures f;
  if (speed < 0.95 * p.v_pref) f.push_back("speed after 3 tau " + std::to_string(speed));
  if (std::abs(speed - closed) > 0.05 * closed) f.push_back("off the closed form by more than 5%");

  CounterRng rng(12);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 mid{rng.uniform(-5, 5), rng.uniform(-5, 5)}, off{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    HumanState a, b;
    a.position = a.goal = mid + off;
    b.position = b.goal = mid - off;
    const std::vector<Neighbor> na{{b.position, {}, b.radius}}, nb{{a.position, {}, a.radius}};
    const Vec2 s = social_force(a, na, {}, p) + social_force(b, nb, {}, p);
    worst = std::max({worst, std::abs(s.x), std::abs(s.y)});
  }
  if (worst > 1e-9) f.push_back("antisymmetry residual " + std::to_string(worst));
  char buf[120];
  std::snprintf(buf, sizeof buf, "speed %.4f after 3 tau (closed form %.4f); antisymmetry residual %.1e", speed, closed,
                worst);
  return from_failures(f, buf);
}

Outcome metrics_oracle() {
  const std::string data = MINISOCIAL_TEST_DATA;
  const auto logs = parse_episode_logs(read_text_file(data + "/metrics_two_episodes.jsonl"));
  const auto want = parse_metrics_csv(read_text_file(data + "/metrics_two_episodes.expected.csv"));
  const auto got = compute_metrics(logs);
  if (want.size() != 1 || !(got == want[0])) {
    const std::vector<MetricsRow> rows{got};
    return {false, "got " + metrics_csv(rows)};
  }
  return {true, "success 50%, partial 75%, stop 0.75, max_dv 75 reproduced exactly"};
}

struct Rates {
  double success = 0.0;
  int episodes = 0;
  int with_collision = 0;
};

Rates only_local_rates(MiniGameKind kind, int k) {
  Rates r;
  OnlyLocalPolicy p;
  double succ = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    EnvConfig cfg;
    cfg.scenarios = {generate(kind)};
    cfg.seed = seed;
    const int ks[] = {k};
    const auto res = evaluate(p, cfg, 25, ks);
    succ += res.rows[0].success;
    for (const auto& log : res.logs) {
      ++r.episodes;
      if (collision_events(log) > 0) ++r.with_collision;
    }
  }
  r.success = succ / 3.0;
  return r;
}

Outcome only_local_trends() {
  const Rates open = only_local_rates(MiniGameKind::Open, 2);
  const Rates door = only_local_rates(MiniGameKind::Doorway, 5);
  Failures f;
  if (open.success != 100.0) f.push_back("open k=2 success " + pct(open.success));
  if (door.success >= 20.0) f.push_back("doorway k=5 success " + pct(door.success));
  if (2 * door.with_collision <= door.episodes) f.push_back("doorway k=5 collisions in too few episodes");
  return from_failures(f, "open k=2 " + pct(open.success) + "; doorway k=5 " + pct(door.success) + ", collisions in " +
                              std::to_string(door.with_collision) + "/" + std::to_string(door.episodes) +
                              " episodes");
}

Outcome learning_sanity() {
  std::string detail;
  Failures f;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    EnvConfig cfg;
    cfg.scenarios = {generate(MiniGameKind::Doorway)};
    cfg.num_agents = {{0, 2}};
    cfg.seed = seed;
    apply_run_type("AO", cfg);
    TrainOptions opts;
    opts.total_steps = 200000;
    opts.seed = seed;
    const auto res = train(cfg, LearnerConfig{}, opts);

    EnvConfig eval_cfg = cfg;
    eval_cfg.seed = seed + 1000;
    const int ks[] = {2};
    LearnedPolicy sampled(res.model, "learned", ActionSelection::Sample, eval_cfg.seed);
    LearnedPolicy greedy(res.model, "learned_greedy");
    OnlyLocalPolicy local;
    const double s = evaluate(sampled, eval_cfg, 25, ks).rows[0].success;
    const double g = evaluate(greedy, eval_cfg, 25, ks).rows[0].success;
    const double o = evaluate(local, eval_cfg, 25, ks).rows[0].success;
    if (s < o) f.push_back("seed " + std::to_string(seed));
    detail += (detail.empty() ? "" : "; ") + ("seed " + std::to_string(seed) + " learned " + pct(s) + " vs only local " +
                                             pct(o) + " (argmax " + pct(g) + ")");
  }
  if (!f.empty()) return {false, "learned below only local; " + detail};
  return {true, detail};
}

Outcome wire_equivalence() {
  return from_failures(minisocial::testing::wire_equivalence_failures(3, 3), "3 episodes byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  std::string report_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") quick = true;
    else if (a == "--report" && i + 1 < argc) report_path = argv[++i];
  }
  std::string report;
  const auto emit = [&](const std::string& line) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    report += line + "\n";
  };
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"determinism", determinism},
      {"reward constants", reward_constants},
      {"stall rule",
       [] { return from_failures(minisocial::testing::stall_failures(), "all-STOP episode ends at step 100"); }},
      {"schedule", [] { return from_failures(minisocial::testing::schedule_failures(), "0/35/70 -> 3/4/5"); }},
      {"geometric constraint",
       [] {
         return from_failures(minisocial::testing::geometric_failures(100), "4 kinds x 100 episodes share a point");
       }},
      {"dynamics properties", dynamics},
      {"social forces", social_forces},
      {"metrics oracle", metrics_oracle},
      {"only local trends", only_local_trends},
      {"learning sanity", learning_sanity},
      {"wire-path equivalence", wire_equivalence},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (quick && name == "learning sanity") {
      emit("SKIP " + name + ": --quick");
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char t[32];
    std::snprintf(t, sizeof t, " [%.1fs]", secs);
    emit(std::string(o.pass ? "PASS " : "FAIL ") + name + ": " + o.detail + t);
    if (!o.pass) ++failed;
  }
  if (!report_path.empty()) std::ofstream(report_path) << report;
  return failed == 0 ? 0 : 1;
}
