// Python module: environment stepping, baselines, training and metrics.
// Configs cross the boundary as run-config JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "minisocial/baselines.hpp"
#include "minisocial/config_error.hpp"
#include "minisocial/environment.hpp"
#include "minisocial/metrics.hpp"
#include "minisocial/run_config.hpp"

namespace py = pybind11;
using namespace minisocial;

namespace {

RunConfig run_config(const std::string& config_json) {
  return RunConfig::from_json(config_json.empty() ? json::object() : json::parse(config_json));
}

py::dict row_dict(const MetricsRow& r) {
  py::dict d;
  d["scenario"] = r.scenario;
  d["policy"] = r.policy;
  d["k"] = r.k;
  d["trials"] = r.trials;
  d["success"] = r.success;
  d["partial_success"] = r.partial_success;
  d["avg_length"] = r.avg_length;
  d["coll_rate"] = r.coll_rate;
  d["stop_time"] = r.stop_time;
  d["max_dv"] = r.max_dv;
  return d;
}

std::unique_ptr<Policy> builtin_policy(const std::string& name) {
  if (name == "only_local" || name == "go") return std::make_unique<OnlyLocalPolicy>();
  if (name == "stop") return std::make_unique<ScriptedPolicy>("stop", [](int, int) { return Action::Stop; });
  throw ConfigError("unknown policy '" + name + "'");
}

py::dict eval_result(const EvalResult& res) {
  py::list rows;
  for (const auto& r : res.rows) rows.append(row_dict(r));
  std::string logs;
  for (const auto& l : res.logs) logs += l.to_jsonl();
  py::dict out;
  out["rows"] = rows;
  out["csv"] = metrics_csv(res.rows);
  out["logs"] = logs;
  return out;
}

class PyEnv {
 public:
  explicit PyEnv(const std::string& config_json) : env_(run_config(config_json).env_config()) {}

  std::vector<std::vector<double>> reset(std::int64_t episode) {
    std::vector<std::vector<double>> out;
    for (const auto& f : env_.reset(episode)) out.push_back(f.vector);
    return out;
  }

  py::dict step(const std::map<int, std::string>& actions) {
    std::vector<std::pair<int, Action>> acts;
    for (const auto& [id, a] : actions) acts.emplace_back(id, action_from_string(a));
    const StepResult r = env_.step(acts);
    py::dict obs, rew, term, terms;
    for (const auto& a : r.agents) {
      obs[py::int_(a.id)] = a.observation.vector;
      rew[py::int_(a.id)] = a.reward.total;
      term[py::int_(a.id)] = a.terminated;
      py::dict t;
      for (const auto& [name, v] : a.reward.terms) t[py::str(name)] = v;
      terms[py::int_(a.id)] = t;
    }
    py::dict out;
    out["observations"] = obs;
    out["rewards"] = rew;
    out["reward_terms"] = terms;
    out["terminated"] = term;
    out["done"] = r.done;
    out["reason"] = r.reason;
    return out;
  }

  Environment env_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-robot social navigation benchmark core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);

  py::class_<PyEnv>(m, "Env")
      .def(py::init<const std::string&>(), py::arg("config_json") = "")
      .def("reset", &PyEnv::reset, py::arg("episode") = 0, "Observation vectors, one per agent id.")
      .def("step", &PyEnv::step, py::arg("actions"), "actions: {agent_id: 'GO' | 'STOP'} for every live agent.")
      .def_property_readonly("live_agents", [](const PyEnv& e) { return e.env_.live_agents(); })
      .def_property_readonly("done", [](const PyEnv& e) { return e.env_.done(); })
      .def_property_readonly("step_count", [](const PyEnv& e) { return e.env_.step_count(); })
      .def_property_readonly("observation_size", [](const PyEnv& e) { return e.env_.observation_size(); })
      .def_property_readonly("config_hash", [](const PyEnv& e) { return e.env_.config().hash(); })
      .def("log_jsonl", [](const PyEnv& e) { return e.env_.log().to_jsonl(); });

  m.def(
      "evaluate",
      [](const std::string& policy, const std::string& config_json, int trials, const std::vector<int>& ks) {
        const RunConfig rc = run_config(config_json);
        auto p = builtin_policy(policy);
        return eval_result(evaluate(*p, rc.env_config(), trials, ks.empty() ? rc.eval_num_agents : ks));
      },
      py::arg("policy") = "only_local", py::arg("config_json") = "", py::arg("trials") = 25,
      py::arg("k") = std::vector<int>{});

  m.def(
      "evaluate_checkpoint",
      [](const std::string& checkpoint, const std::string& config_json, int trials, const std::vector<int>& ks,
         bool sample) {
        const RunConfig rc = run_config(config_json);
        auto model = std::make_shared<ActorCritic>(ActorCritic::from_checkpoint(checkpoint));
        LearnedPolicy p(model, "learned", sample ? ActionSelection::Sample : ActionSelection::Greedy, rc.seed);
        return eval_result(evaluate(p, rc.env_config(), trials, ks.empty() ? rc.eval_num_agents : ks));
      },
      py::arg("checkpoint"), py::arg("config_json") = "", py::arg("trials") = 25, py::arg("k") = std::vector<int>{},
      py::arg("sample") = false);

  m.def(
      "train",
      [](const std::string& config_json, std::int64_t steps) {
        const RunConfig rc = run_config(config_json);
        const EnvConfig env_cfg = rc.env_config();
        TrainOptions opts;
        opts.total_steps = steps < 0 ? rc.train_length : steps;
        opts.seed = rc.seed;
        TrainResult res;
        {
          py::gil_scoped_release release;
          res = train(env_cfg, rc.learner_config(), opts);
        }
        return res.model->checkpoint(env_cfg.hash(), res.steps);
      },
      py::arg("config_json") = "", py::arg("steps") = -1, "Returns checkpoint text.");

  m.def(
      "compute_metrics",
      [](const std::string& jsonl) {
        const auto logs = parse_episode_logs(jsonl);
        return row_dict(compute_metrics(logs));
      },
      py::arg("jsonl"));
}
