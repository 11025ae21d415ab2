#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "minisocial/environment.hpp"

namespace minisocial {

inline constexpr int kWireFormatVersion = 1;

/// Newline-delimited text over a pair of file descriptors.
class LineChannel {
 public:
  LineChannel(int in_fd, int out_fd, bool owns = false) : in_(in_fd), out_(out_fd), owns_(owns) {}
  ~LineChannel();
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;

  /// nullopt on end of stream.
  std::optional<std::string> read_line();
  /// False when the peer has gone away.
  bool write_line(const std::string& line);
  void close();

 private:
  int in_;
  int out_;
  bool owns_;
  std::string buf_;
};

/// Listen on a unix socket path and accept exactly one connection.
/// Throws std::runtime_error.
int accept_unix_socket(const std::string& path);
int connect_unix_socket(const std::string& path);

struct ServeOptions {
  std::int64_t first_episode = 0;
  int episodes = 1;
  /// Called with each finished (or aborted) episode log.
  std::function<void(const EpisodeLog&)> on_log;
};

struct ServeResult {
  int episodes_completed = 0;
  std::vector<EpisodeLog> logs;
  std::string error;  // empty unless the session ended on a protocol violation or drop
};

/// Drive an environment for an external controller in lock step:
/// hello exchange, then per episode reset, (obs -> act -> step_result)* and
/// episode_end. A violation sends an error and closes; a drop aborts the
/// running episode.
ServeResult serve(const EnvConfig& cfg, LineChannel& channel, const ServeOptions& opts);

/// Controller side: answers every obs with decide(agent id, observation
/// vector). Returns the number of episode_end messages seen. Throws
/// std::runtime_error on an error message or malformed input.
using Controller = std::function<Action(int agent_id, const std::vector<double>& obs)>;
int run_controller(LineChannel& channel, const Controller& decide, const std::string& policy_name = "external");

}  // namespace minisocial
