#include "minisocial/episode_log.hpp"

#include <sstream>
#include <stdexcept>

#include "minisocial/geometry_io.hpp"
#include "minisocial/json_util.hpp"

namespace minisocial {

namespace {

json pose_json(const Pose& p) { return {{"x", round9(p.x)}, {"y", round9(p.y)}, {"psi", round9(p.psi)}}; }

std::runtime_error bad_line(std::size_t line, const std::string& what) {
  return std::runtime_error("episode log line " + std::to_string(line) + ": " + what);
}

LogStep step_from_json(const json& j) {
  LogStep s;
  s.t = j.at("t").get<int>();
  for (const auto& a : j.at("agents")) {
    LogAgentStep e;
    e.id = a.at("id").get<int>();
    e.x = a.at("x").get<double>();
    e.y = a.at("y").get<double>();
    e.psi = a.at("psi").get<double>();
    e.v = a.at("v").get<double>();
    if (!a.at("action").is_null()) e.action = action_from_string(a.at("action").get<std::string>());
    e.reward = a.at("reward").get<double>();
    e.coll = a.at("coll").get<std::vector<int>>();
    e.succ = a.at("succ").get<bool>();
    s.agents.push_back(std::move(e));
  }
  if (j.contains("humans")) {
    for (const auto& h : j.at("humans")) {
      s.humans.push_back({h.at("id").get<int>(), h.at("x").get<double>(), h.at("y").get<double>()});
    }
  }
  return s;
}

}  // namespace

std::string EpisodeLog::header_line() const {
  json j;
  j["type"] = "header";
  j["format_version"] = kFormatVersion;
  j["scenario"] = scenario;
  j["policy"] = policy;
  j["k"] = k;
  j["seed"] = seed;
  j["episode"] = episode;
  j["config_hash"] = config_hash;
  j["dt"] = round9(dt);
  j["max_steps"] = max_steps;
  json agents = json::array();
  for (const auto& a : init) {
    json e = {{"id", a.id}};
    e.update(pose_json(a.pose));
    e["radius"] = round9(a.radius);
    e["route"] = a.route;
    agents.push_back(std::move(e));
  }
  j["init"] = std::move(agents);
  return j.dump();
}

std::string EpisodeLog::step_line(const LogStep& s) {
  json j;
  j["t"] = s.t;
  json agents = json::array();
  for (const auto& a : s.agents) {
    agents.push_back({{"id", a.id},
                      {"x", round9(a.x)},
                      {"y", round9(a.y)},
                      {"psi", round9(a.psi)},
                      {"v", round9(a.v)},
                      {"action", a.action ? json(std::string(to_string(*a.action))) : json(nullptr)},
                      {"reward", round9(a.reward)},
                      {"coll", a.coll},
                      {"succ", a.succ}});
  }
  j["agents"] = std::move(agents);
  if (!s.humans.empty()) {
    json humans = json::array();
    for (const auto& h : s.humans) humans.push_back({{"id", h.id}, {"x", round9(h.x)}, {"y", round9(h.y)}});
    j["humans"] = std::move(humans);
  }
  return j.dump();
}

std::string EpisodeLog::footer_line() const {
  json j;
  j["type"] = "footer";
  j["reason"] = reason;
  j["length"] = length;
  return j.dump();
}

std::string EpisodeLog::to_jsonl() const {
  std::string out = header_line() + "\n";
  for (const auto& s : steps) out += step_line(s) + "\n";
  if (finished()) out += footer_line() + "\n";
  return out;
}

std::vector<EpisodeLog> parse_episode_logs(const std::string& text) {
  std::vector<EpisodeLog> logs;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  EpisodeLog* cur = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw bad_line(lineno, e.what());
    }
    try {
      const std::string type = j.value("type", std::string("step"));
      if (type == "header") {
        if (j.value("format_version", 0) != kFormatVersion) throw bad_line(lineno, "unsupported format_version");
        EpisodeLog log;
        log.scenario = j.at("scenario").get<std::string>();
        log.policy = j.value("policy", std::string());
        log.k = j.at("k").get<int>();
        log.seed = j.at("seed").get<std::uint64_t>();
        log.episode = j.value("episode", std::int64_t{0});
        log.config_hash = j.value("config_hash", std::string());
        log.dt = j.value("dt", 0.1);
        log.max_steps = j.value("max_steps", 0);
        for (const auto& a : j.value("init", json::array())) {
          LogAgentInit e;
          e.id = a.at("id").get<int>();
          e.pose = {a.at("x").get<double>(), a.at("y").get<double>(), a.at("psi").get<double>()};
          e.radius = a.value("radius", 0.3);
          e.route = a.value("route", std::vector<NodeId>{});
          log.init.push_back(std::move(e));
        }
        logs.push_back(std::move(log));
        cur = &logs.back();
      } else if (type == "footer") {
        if (!cur) throw bad_line(lineno, "footer before header");
        cur->reason = j.at("reason").get<std::string>();
        cur->length = j.at("length").get<int>();
        if (cur->length != static_cast<int>(cur->steps.size())) {
          throw bad_line(lineno, "footer length " + std::to_string(cur->length) + " but " +
                                     std::to_string(cur->steps.size()) + " step records");
        }
        cur = nullptr;
      } else {
        if (!cur) throw bad_line(lineno, "step record outside an episode");
        LogStep s = step_from_json(j);
        if (s.t != static_cast<int>(cur->steps.size())) {
          throw bad_line(lineno, "expected t=" + std::to_string(cur->steps.size()) + ", got " + std::to_string(s.t));
        }
        cur->steps.push_back(std::move(s));
      }
    } catch (const json::exception& e) {
      throw bad_line(lineno, e.what());
    } catch (const std::invalid_argument& e) {
      throw bad_line(lineno, e.what());
    }
  }
  return logs;
}

EpisodeLog parse_episode_log(const std::string& text) {
  auto logs = parse_episode_logs(text);
  if (logs.size() != 1) throw std::runtime_error("expected one episode, found " + std::to_string(logs.size()));
  return std::move(logs.front());
}

EpisodeLog load_episode_log(const std::filesystem::path& path) { return parse_episode_log(read_text_file(path)); }

}  // namespace minisocial
