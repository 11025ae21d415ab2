#include "minisocial/protocol.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <map>
#include <stdexcept>

namespace minisocial {

LineChannel::~LineChannel() { close(); }

void LineChannel::close() {
  if (!owns_) return;
  if (in_ >= 0) ::close(in_);
  if (out_ >= 0 && out_ != in_) ::close(out_);
  in_ = out_ = -1;
  owns_ = false;
}

std::optional<std::string> LineChannel::read_line() {
  for (;;) {
    if (auto pos = buf_.find('\n'); pos != std::string::npos) {
      std::string line = buf_.substr(0, pos);
      buf_.erase(0, pos + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::read(in_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      if (buf_.empty()) return std::nullopt;
      std::string rest = std::move(buf_);
      buf_.clear();
      return rest;
    }
    buf_.append(chunk, static_cast<std::size_t>(n));
  }
}

bool LineChannel::write_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(out_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) {
      // pipes and ttys
      const ssize_t w = ::write(out_, data.data() + off, data.size() - off);
      if (w < 0 && errno == EINTR) continue;
      if (w <= 0) return false;
      off += static_cast<std::size_t>(w);
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

namespace {

sockaddr_un unix_address(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof addr.sun_path) throw std::runtime_error("socket path too long: " + path);
  std::strncpy(addr.sun_path, path.c_str(), sizeof addr.sun_path - 1);
  return addr;
}

}  // namespace

int accept_unix_socket(const std::string& path) {
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("socket: " + std::string(std::strerror(errno)));
  ::unlink(path.c_str());
  auto addr = unix_address(path);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 1) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd);
    throw std::runtime_error("cannot listen on " + path + ": " + err);
  }
  const int conn = ::accept(fd, nullptr, nullptr);
  ::close(fd);
  ::unlink(path.c_str());
  if (conn < 0) throw std::runtime_error("accept: " + std::string(std::strerror(errno)));
  return conn;
}

int connect_unix_socket(const std::string& path) {
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("socket: " + std::string(std::strerror(errno)));
  auto addr = unix_address(path);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd);
    throw std::runtime_error("cannot connect to " + path + ": " + err);
  }
  return fd;
}

namespace {

json obs_message(std::int64_t seq, int t, const std::vector<int>& live, const std::map<int, ObservationFrame>& obs) {
  json agents = json::array();
  for (int id : live) {
    const auto& f = obs.at(id);
    json named = json::object();
    for (const auto& [k, v] : f.named) named[k] = v;
    agents.push_back(json{{"id", id}, {"obs", f.vector}, {"named", named}});
  }
  return json{{"type", "obs"}, {"seq", seq}, {"t", t}, {"agents", agents}};
}

json step_message(std::int64_t seq, const StepResult& r) {
  json agents = json::array();
  for (const auto& a : r.agents) {
    json terms = json::object();
    for (const auto& [k, v] : a.reward.terms) terms[k] = v;
    agents.push_back(json{{"id", a.id},
                          {"reward", a.reward.total},
                          {"terms", terms},
                          {"terminated", a.terminated},
                          {"collision", a.info.collision},
                          {"success", a.info.success},
                          {"d_goal", a.info.d_goal}});
  }
  json m{{"type", "step_result"}, {"seq", seq}, {"agents", agents}, {"done", r.done}};
  if (r.done) m["reason"] = r.reason;
  return m;
}

struct Violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parse an act message answering obs `seq` for exactly the live agents.
std::vector<std::pair<int, Action>> parse_act(const std::string& line, std::int64_t seq,
                                              const std::vector<int>& live) {
  json m;
  try {
    m = json::parse(line);
  } catch (const json::exception&) {
    throw Violation("malformed message");
  }
  if (!m.is_object() || m.value("type", "") != "act") throw Violation("expected act");
  if (!m.contains("seq") || !m["seq"].is_number_integer()) throw Violation("act without seq");
  if (m["seq"].get<std::int64_t>() != seq) {
    throw Violation("stale seq " + m["seq"].dump() + ", expected " + std::to_string(seq));
  }
  if (!m.contains("actions") || !m["actions"].is_array()) throw Violation("act without actions");
  std::vector<std::pair<int, Action>> out;
  std::map<int, bool> seen;
  for (const auto& a : m["actions"]) {
    if (!a.is_object() || !a.contains("id") || !a["id"].is_number_integer() || !a.contains("action") ||
        !a["action"].is_string()) {
      throw Violation("malformed action entry");
    }
    const int id = a["id"].get<int>();
    if (std::find(live.begin(), live.end(), id) == live.end()) {
      throw Violation("action for agent " + std::to_string(id) + " which is not live");
    }
    if (seen[id]) throw Violation("duplicate action for agent " + std::to_string(id));
    seen[id] = true;
    Action act;
    try {
      act = action_from_string(a["action"].get<std::string>());
    } catch (const std::exception&) {
      throw Violation("unknown action '" + a["action"].get<std::string>() + "'");
    }
    out.emplace_back(id, act);
  }
  if (out.size() != live.size()) throw Violation("act must cover every live agent");
  return out;
}

}  // namespace

ServeResult serve(const EnvConfig& cfg, LineChannel& ch, const ServeOptions& opts) {
  ServeResult result;
  Environment env(cfg);
  std::int64_t seq = 0;
  auto send = [&](json m) { return ch.write_line(m.dump()); };
  auto fail = [&](const std::string& msg) {
    result.error = msg;
    send(json{{"type", "error"}, {"seq", ++seq}, {"message", msg}});
    ch.close();
  };

  json layout = json::array();
  for (const auto& [name, n] : observation_layout(cfg.observer)) layout.push_back(json::array({name, n}));
  if (!send(json{{"type", "hello"},
                 {"seq", seq},
                 {"format_version", kWireFormatVersion},
                 {"observation_size", observation_size(cfg.observer)},
                 {"observation_layout", layout},
                 {"actions", json::array({"GO", "STOP"})},
                 {"config_hash", cfg.hash()}})) {
    result.error = "peer closed before hello";
    return result;
  }
  auto reply = ch.read_line();
  if (!reply) {
    result.error = "peer closed during hello";
    return result;
  }
  std::string policy = "external";
  try {
    const json h = json::parse(*reply);
    if (!h.is_object() || h.value("type", "") != "hello") return fail("expected hello"), result;
    if (!h.contains("format_version") || h["format_version"] != kWireFormatVersion) {
      return fail("format_version mismatch: server speaks " + std::to_string(kWireFormatVersion)), result;
    }
    if (h.contains("policy") && h["policy"].is_string()) policy = h["policy"].get<std::string>();
  } catch (const json::exception&) {
    return fail("malformed hello"), result;
  }
  env.set_policy_name(policy);

  for (int e = 0; e < opts.episodes; ++e) {
    const std::int64_t episode = opts.first_episode + e;
    auto frames = env.reset(episode);
    std::map<int, ObservationFrame> obs;
    for (std::size_t i = 0; i < frames.size(); ++i) obs[static_cast<int>(i)] = std::move(frames[i]);
    send(json{{"type", "reset"},
              {"seq", ++seq},
              {"episode", episode},
              {"k", env.num_agents()},
              {"scenario", env.scenario().id()}});
    while (!env.done()) {
      const auto live = env.live_agents();
      const std::int64_t obs_seq = ++seq;
      if (!send(obs_message(obs_seq, env.step_count(), live, obs))) {
        env.abort("disconnected");
        result.error = "peer closed";
        break;
      }
      auto line = ch.read_line();
      if (!line) {
        env.abort("disconnected");
        result.error = "peer closed";
        break;
      }
      std::vector<std::pair<int, Action>> actions;
      try {
        actions = parse_act(*line, obs_seq, live);
      } catch (const Violation& v) {
        env.abort("protocol_error");
        fail(v.what());
        break;
      }
      auto r = env.step(actions);
      send(step_message(++seq, r));
      for (auto& a : r.agents) obs[a.id] = std::move(a.observation);
    }
    const auto& log = env.log();
    if (opts.on_log) opts.on_log(log);
    result.logs.push_back(log);
    if (!result.error.empty()) return result;
    send(json{{"type", "episode_end"},
              {"seq", ++seq},
              {"episode", episode},
              {"reason", log.reason},
              {"length", log.length}});
    ++result.episodes_completed;
  }
  ch.close();
  return result;
}

int run_controller(LineChannel& ch, const Controller& decide, const std::string& policy_name) {
  auto next = [&]() -> std::optional<json> {
    auto line = ch.read_line();
    if (!line) return std::nullopt;
    try {
      return json::parse(*line);
    } catch (const json::exception&) {
      throw std::runtime_error("controller: malformed message from server");
    }
  };
  auto hello = next();
  if (!hello || hello->value("type", "") != "hello") throw std::runtime_error("controller: expected hello");
  if ((*hello)["format_version"] != kWireFormatVersion) {
    throw std::runtime_error("controller: unsupported format_version " + (*hello)["format_version"].dump());
  }
  ch.write_line(json{{"type", "hello"}, {"seq", 0}, {"format_version", kWireFormatVersion}, {"policy", policy_name}}
                    .dump());
  int episodes = 0;
  std::int64_t last_seq = 0;
  while (auto m = next()) {
    const std::string type = m->value("type", "");
    const std::int64_t seq = m->value("seq", std::int64_t{-1});
    if (seq <= last_seq) throw std::runtime_error("controller: server seq did not increase");
    last_seq = seq;
    if (type == "error") throw std::runtime_error("controller: server error: " + m->value("message", ""));
    if (type == "episode_end") ++episodes;
    if (type != "obs") continue;
    json actions = json::array();
    for (const auto& a : (*m)["agents"]) {
      const int id = a["id"].get<int>();
      const Action act = decide(id, a["obs"].get<std::vector<double>>());
      actions.push_back(json{{"id", id}, {"action", std::string(to_string(act))}});
    }
    if (!ch.write_line(json{{"type", "act"}, {"seq", seq}, {"actions", actions}}.dump())) break;
  }
  return episodes;
}

}  // namespace minisocial
