#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "minisocial/baselines.hpp"
#include "minisocial/geometry_io.hpp"
#include "minisocial/metrics.hpp"
#include "minisocial/protocol.hpp"
#include "minisocial/run_config.hpp"

namespace fs = std::filesystem;
using namespace minisocial;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "run config JSON");
  app->add_option("--seed", c.seed, "seed (overrides the config)");
}

RunConfig load(const Common& c) {
  RunConfig rc;
  if (!c.config.empty()) rc = load_run_config(c.config);
  if (c.seed) rc.seed = *c.seed;
  for (const auto& w : rc.warnings) std::cerr << "warning: " << w << "\n";
  return rc;
}

fs::path log_root() {
  const char* env = std::getenv("MINISOCIAL_LOG_DIR");
  return env && *env ? fs::path(env) : fs::path("runs");
}

fs::path run_dir(const RunConfig& rc) {
  fs::path d = log_root() / rc.run_name;
  fs::create_directories(d);
  return d;
}

void write_logs(const fs::path& path, const std::vector<EpisodeLog>& logs) {
  std::string text;
  for (const auto& l : logs) text += l.to_jsonl();
  write_text_file(path, text);
}

std::string safe_name(std::string s) {
  for (char& c : s) {
    if (c == '/' || c == ' ' || c == ':') c = '_';
  }
  return s;
}

/// "only_local", "stop" (always STOP), or a checkpoint file.
/// `sample` makes a learned policy draw actions instead of taking the argmax.
std::unique_ptr<Policy> make_policy(const std::string& spec, bool sample, std::uint64_t seed) {
  if (spec == "only_local" || spec == "go") return std::make_unique<OnlyLocalPolicy>();
  if (spec == "stop") {
    return std::make_unique<ScriptedPolicy>("stop", [](int, int) { return Action::Stop; });
  }
  if (!fs::exists(spec)) throw ConfigError("policy '" + spec + "' is neither a built-in policy nor a checkpoint file");
  std::string hash;
  auto model = std::make_shared<ActorCritic>(ActorCritic::from_checkpoint(read_text_file(spec), &hash));
  return std::make_unique<LearnedPolicy>(model, fs::path(spec).stem().string(),
                                         sample ? ActionSelection::Sample : ActionSelection::Greedy, seed);
}

void emit_metrics(const RunConfig& rc, const fs::path& dir, const std::vector<MetricsRow>& rows) {
  const std::string csv = metrics_csv(rows);
  write_text_file(dir / (rc.metrics.csv.empty() ? "metrics.csv" : rc.metrics.csv), csv);
  if (rc.metrics.table) std::cout << metrics_table(rows);
  else std::cout << csv;
}

int cmd_gen_scenario(const Common& c, const std::string& kind_name, int k, const std::string& out) {
  RunConfig rc = load(c);
  const std::string name = kind_name.empty() ? rc.experiment_names.front() : kind_name;
  const auto kind = mini_game_from_string(name);
  if (!kind) throw ConfigError("gen-scenario: unknown mini-game '" + name + "'");
  MiniGameParams params = default_params(*kind);
  for (const auto& p : rc.scenario_params) {
    if (p.kind == *kind) params = p;
  }
  auto game = generate(params);
  CounterRng rng = CounterRng(rc.seed).split("gen-scenario");
  const int n = k > 0 ? k : game->max_agents();
  Scenario sc = to_scenario(*game, n, rng);
  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  const std::string stem(to_string(*kind));
  save_map(dir / (stem + ".map.json"), game->map());
  save_graph(dir / (stem + ".graph.json"), game->graph());
  save_scenario(dir / (stem + ".scenario.json"), sc);
  std::cout << (dir / (stem + ".scenario.json")).string() << "\n";
  return 0;
}

int cmd_validate(const std::vector<std::string>& files) {
  int bad = 0;
  for (const auto& f : files) {
    std::vector<std::string> problems;
    Warnings warnings;
    try {
      const std::string path = f;
      if (path.ends_with(".map.json")) {
        load_map(path, &warnings);
      } else if (path.ends_with(".graph.json")) {
        const NavGraph g = load_graph(path, &warnings);
        const fs::path map_path = fs::path(path).parent_path() / (g.map_name() + ".map.json");
        if (fs::exists(map_path)) {
          const VectorMap m = load_map(map_path, &warnings);
          for (const auto& [a, b] : validate_graph(m, g)) {
            problems.push_back("edge " + std::to_string(a) + "-" + std::to_string(b) + " crosses a wall");
          }
        } else {
          problems.push_back("referenced map file " + map_path.string() + " not found");
        }
      } else {
        problems = check_bundle(load_bundle(path, &warnings));
      }
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
    for (const auto& w : warnings) std::cerr << f << ": warning: " << w << "\n";
    if (problems.empty()) {
      std::cout << f << ": ok\n";
    } else {
      ++bad;
      for (const auto& p : problems) std::cerr << f << ": " << p << "\n";
    }
  }
  return bad == 0 ? 0 : 1;
}

int cmd_train(const Common& c, std::optional<std::int64_t> steps, std::string out, bool eval_after) {
  RunConfig rc = load(c);
  const EnvConfig env_cfg = rc.env_config();
  const LearnerConfig lc = rc.learner_config();
  const fs::path dir = run_dir(rc);
  if (out.empty()) out = (dir / "checkpoint.json").string();
  write_text_file(dir / "config.json", rc.to_json().dump(2) + "\n");

  TrainOptions opts;
  opts.total_steps = steps.value_or(rc.train_length);
  opts.seed = rc.seed;
  opts.on_checkpoint = [&](const std::string& text, std::int64_t s) {
    if (s < opts.total_steps) write_text_file(dir / ("checkpoint_" + std::to_string(s) + ".json"), text);
  };
  std::int64_t next_eval = rc.eval_frequency;
  opts.on_batch = [&](const ActorCritic& model, std::int64_t s, double ret) {
    std::cerr << "step " << s << " mean_return " << ret << "\n";
    if (rc.eval_frequency <= 0 || s < next_eval) return;
    while (next_eval <= s) next_eval += rc.eval_frequency;
    const int trials = rc.intermediate_eval_trials < 0 ? rc.ending_eval_trials : rc.intermediate_eval_trials;
    auto snapshot = std::make_shared<ActorCritic>(model);
    LearnedPolicy p(snapshot, "learned");
    EnvConfig ec = env_cfg;
    const auto res = evaluate(p, ec, trials, rc.eval_num_agents);
    std::cerr << metrics_table(res.rows);
  };
  auto result = train(env_cfg, lc, opts);
  write_text_file(out, result.model->checkpoint(env_cfg.hash(), result.steps));
  std::cerr << "trained " << result.steps << " steps over " << result.episodes << " episodes -> " << out << "\n";
  if (!eval_after) return 0;
  LearnedPolicy policy(result.model, "learned");
  const auto res = evaluate(policy, env_cfg, rc.ending_eval_trials, rc.eval_num_agents);
  write_logs(dir / "eval_learned.jsonl", res.logs);
  emit_metrics(rc, dir, res.rows);
  return 0;
}

int cmd_eval(const Common& c, const std::string& policy_spec, std::optional<int> trials, std::vector<int> ks,
             bool sample) {
  RunConfig rc = load(c);
  const EnvConfig env_cfg = rc.env_config();
  if (ks.empty()) ks = rc.eval_num_agents;
  auto policy = make_policy(policy_spec, sample, rc.seed);
  const auto res = evaluate(*policy, env_cfg, trials.value_or(rc.ending_eval_trials), ks);
  const fs::path dir = run_dir(rc);
  write_logs(dir / ("eval_" + safe_name(policy->name()) + ".jsonl"), res.logs);
  emit_metrics(rc, dir, res.rows);
  return 0;
}

int cmd_bench(const Common& c, const std::vector<std::string>& policies, std::vector<std::string> scenarios,
              std::optional<int> trials, std::vector<int> ks, bool sample) {
  RunConfig rc = load(c);
  if (scenarios.empty()) scenarios = rc.experiment_names;
  if (ks.empty()) ks = rc.eval_num_agents;
  const fs::path dir = run_dir(rc);
  std::vector<MetricsRow> rows;
  for (const auto& spec : policies) {
    auto policy = make_policy(spec, sample, rc.seed);
    for (const auto& sc : scenarios) {
      RunConfig one = rc;
      one.experiment_names = {sc};
      const auto res = evaluate(*policy, one.env_config(), trials.value_or(rc.ending_eval_trials), ks);
      write_logs(dir / ("bench_" + safe_name(policy->name()) + "_" + safe_name(sc) + ".jsonl"), res.logs);
      rows.insert(rows.end(), res.rows.begin(), res.rows.end());
    }
  }
  emit_metrics(rc, dir, rows);
  return 0;
}

int cmd_replay(const std::string& log_file, const std::string& out) {
  const auto logs = parse_episode_logs(read_text_file(log_file));
  json episodes = json::array();
  for (const auto& log : logs) {
    json frames = json::array();
    json first = json::array();
    for (const auto& a : log.init) first.push_back(json::array({a.id, a.pose.x, a.pose.y, a.pose.psi}));
    frames.push_back(json{{"t", -1}, {"agents", first}, {"humans", json::array()}});
    for (const auto& s : log.steps) {
      json agents = json::array();
      for (const auto& a : s.agents) agents.push_back(json::array({a.id, a.x, a.y, a.psi}));
      json humans = json::array();
      for (const auto& h : s.humans) humans.push_back(json::array({h.id, h.x, h.y}));
      frames.push_back(json{{"t", s.t}, {"agents", agents}, {"humans", humans}});
    }
    json radii = json::array();
    for (const auto& a : log.init) radii.push_back(a.radius);
    episodes.push_back(json{{"scenario", log.scenario},
                            {"episode", log.episode},
                            {"dt", log.dt},
                            {"radii", radii},
                            {"reason", log.reason},
                            {"frames", frames}});
  }
  const std::string text = json{{"type", "replay"}, {"episodes", episodes}}.dump() + "\n";
  if (out.empty()) std::cout << text;
  else write_text_file(out, text);
  return 0;
}

int cmd_serve(const Common& c, int episodes, std::int64_t first, const std::string& socket_path) {
  RunConfig rc = load(c);
  const EnvConfig env_cfg = rc.env_config();
  const fs::path dir = run_dir(rc);
  std::unique_ptr<LineChannel> ch;
  if (socket_path.empty()) {
    ch = std::make_unique<LineChannel>(0, 1);
  } else {
    const int fd = accept_unix_socket(socket_path);
    ch = std::make_unique<LineChannel>(fd, fd, true);
  }
  ServeOptions opts;
  opts.first_episode = first;
  opts.episodes = episodes;
  const auto res = serve(env_cfg, *ch, opts);
  write_logs(dir / "serve.jsonl", res.logs);
  if (!res.error.empty()) {
    std::cerr << "serve: " << res.error << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minisocial: multi-agent social navigation mini-games"};
  app.require_subcommand(1);

  Common gen_c, train_c, eval_c, bench_c, serve_c, validate_c, replay_c;

  auto* gen = app.add_subcommand("gen-scenario", "write map, graph and scenario files for a mini-game");
  add_common(gen, gen_c);
  std::string gen_kind, gen_out;
  int gen_k = 0;
  gen->add_option("--kind", gen_kind, "mini-game (default: first experiment name)");
  gen->add_option("-k,--agents", gen_k, "routes to sample (default: capacity)");
  gen->add_option("-o,--out", gen_out, "output directory");

  auto* tr = app.add_subcommand("train", "train the on-board learner");
  add_common(tr, train_c);
  std::optional<std::int64_t> tr_steps;
  std::string tr_out;
  bool tr_no_eval = false;
  tr->add_option("--steps", tr_steps, "agent steps (default: train_length)");
  tr->add_option("-o,--out", tr_out, "checkpoint path");
  tr->add_flag("--no-eval", tr_no_eval, "skip the final evaluation");

  auto* ev = app.add_subcommand("eval", "evaluate a policy and write logs and metrics");
  add_common(ev, eval_c);
  std::string ev_policy = "only_local";
  std::optional<int> ev_trials;
  std::vector<int> ev_k;
  ev->add_option("--policy", ev_policy, "only_local, stop, or a checkpoint file");
  ev->add_option("--trials", ev_trials, "episodes per k (default: ending_eval_trials)");
  ev->add_option("--k", ev_k, "agent counts (default: eval_num_agents)");
  bool ev_sample = false;
  ev->add_flag("--sample", ev_sample, "learned policies sample actions (seeded) instead of argmax");

  auto* be = app.add_subcommand("bench", "policy x scenario x k grid to one metrics CSV");
  add_common(be, bench_c);
  std::vector<std::string> be_policies{"only_local"}, be_scenarios;
  std::optional<int> be_trials;
  std::vector<int> be_k;
  be->add_option("--policies", be_policies, "policies");
  be->add_option("--scenarios", be_scenarios, "scenarios (default: experiment_names)");
  be->add_option("--trials", be_trials, "episodes per cell");
  be->add_option("--k", be_k, "agent counts");
  bool be_sample = false;
  be->add_flag("--sample", be_sample, "learned policies sample actions (seeded) instead of argmax");

  auto* rp = app.add_subcommand("replay", "turn an episode log into viewer frames");
  add_common(rp, replay_c);
  std::string rp_log, rp_out;
  rp->add_option("log", rp_log, "episode log (JSONL)")->required();
  rp->add_option("-o,--out", rp_out, "output file (default: stdout)");

  auto* sv = app.add_subcommand("serve", "run episodes for an external controller");
  add_common(sv, serve_c);
  int sv_episodes = 1;
  std::int64_t sv_first = 0;
  std::string sv_socket;
  sv->add_option("--episodes", sv_episodes, "episodes to serve");
  sv->add_option("--first-episode", sv_first, "first episode index");
  sv->add_option("--socket", sv_socket, "unix socket path (default: stdio)");

  auto* va = app.add_subcommand("validate", "check map, graph and scenario files");
  add_common(va, validate_c);
  std::vector<std::string> va_files;
  va->add_option("files", va_files, "files to check")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_scenario(gen_c, gen_kind, gen_k, gen_out);
    if (tr->parsed()) return cmd_train(train_c, tr_steps, tr_out, !tr_no_eval);
    if (ev->parsed()) return cmd_eval(eval_c, ev_policy, ev_trials, ev_k, ev_sample);
    if (be->parsed()) return cmd_bench(bench_c, be_policies, be_scenarios, be_trials, be_k, be_sample);
    if (rp->parsed()) return cmd_replay(rp_log, rp_out);
    if (sv->parsed()) return cmd_serve(serve_c, sv_episodes, sv_first, sv_socket);
    if (va->parsed()) return cmd_validate(va_files);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
