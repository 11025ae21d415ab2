#pragma once

#include <set>
#include <string>

#include "minisocial/config_error.hpp"
#include "minisocial/dynamics.hpp"
#include "minisocial/human_sim.hpp"
#include "minisocial/json_util.hpp"
#include "minisocial/observation.hpp"
#include "minisocial/planner.hpp"
#include "minisocial/reward.hpp"
#include "minisocial/scenarios.hpp"

namespace minisocial {

/// Reads fields out of a JSON object and remembers which keys were used, so
/// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path);

  [[nodiscard]] bool has(const std::string& key) const { return obj_.contains(key); }
  const json& at(const std::string& key);

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!obj_.contains(key)) return;
    used_.insert(key);
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  /// Throws ConfigError listing every key not read.
  void finish() const;
  [[nodiscard]] std::string path(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

json to_json(const KinodynamicConfig& c);
json to_json(const PlannerParams& c);
json to_json(const SocialForceParams& c);
json to_json(const ObserverConfig& c);
json to_json(const RewarderConfig& c);
json to_json(const MiniGameParams& c);

/// Strict readers: unknown keys and bad values raise ConfigError naming the
/// field path. Missing keys keep the value already in `out`.
void from_json(const json& j, KinodynamicConfig& out, const std::string& path = "kinodynamics");
void from_json(const json& j, PlannerParams& out, const std::string& path = "planner");
void from_json(const json& j, SocialForceParams& out, const std::string& path = "humans");
void from_json(const json& j, ObserverConfig& out, const std::string& path = "observer");
void from_json(const json& j, RewarderConfig& out, const std::string& path = "rewards");
void from_json(const json& j, MiniGameParams& out, const std::string& path = "scenario_params");

}  // namespace minisocial
