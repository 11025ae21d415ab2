#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minisocial/config_error.hpp"
#include "minisocial/geometry.hpp"
#include "minisocial/rng.hpp"

namespace minisocial {

enum class MiniGameKind { Open, Doorway, Hallway, Intersection, Roundabout };

std::string_view to_string(MiniGameKind k);
/// Accepts "open", "doorway"/"door", "hallway", "intersection", "roundabout",
/// case-insensitive, with an optional "envs_" prefix.
std::optional<MiniGameKind> mini_game_from_string(std::string_view s);

struct MiniGameParams {
  MiniGameKind kind = MiniGameKind::Doorway;
  double scale = 12.0;           // m; room / box size
  double corridor_width = 1.0;   // m; hallway, intersection arms, roundabout spurs
  double gap_width = 1.0;        // m; doorway opening
  int arm_count = 4;             // intersection arms / roundabout spurs
  double ring_radius = 2.0;      // m; roundabout lane centre
  double length = 20.0;          // m; hallway corridor length, intersection arm length
  int max_agents = 10;
  bool bidirectional = true;

  bool operator==(const MiniGameParams&) const = default;
  /// Throws ConfigError.
  void validate() const;
};

MiniGameParams default_params(MiniGameKind kind);

/// Routes are assembled from slot paths (start slot out to a junction node)
/// joined by a core path between two junctions. A variant fixes which
/// junction pairs may be connected.
class RouteSampler {
 public:
  struct Variant {
    /// core[a][b]: nodes strictly between junction paths a and b, or nullopt
    /// when a -> b is not allowed in this variant.
    std::vector<std::vector<std::optional<std::vector<NodeId>>>> core;
  };

  RouteSampler() = default;
  RouteSampler(std::vector<std::vector<std::vector<NodeId>>> groups, std::vector<Variant> variants,
               int max_agents);

  /// k routes with pairwise-distinct start nodes and goal nodes. Throws
  /// ConfigError when k exceeds capacity or no assignment is found.
  std::vector<Route> sample(int k, CounterRng& rng) const;

  [[nodiscard]] int max_agents() const { return max_agents_; }
  [[nodiscard]] std::size_t group_count() const { return groups_.size(); }
  [[nodiscard]] std::size_t slot_count() const;

 private:
  Route build(const Variant& v, std::size_t a, std::size_t s, std::size_t b, std::size_t g) const;

  std::vector<std::vector<std::vector<NodeId>>> groups_;  // groups_[group][slot] = slot path
  std::vector<Variant> variants_;
  int max_agents_ = 0;
};

/// Anything the environment can draw an episode layout from.
class ScenarioSource {
 public:
  virtual ~ScenarioSource() = default;
  [[nodiscard]] virtual const std::string& id() const = 0;
  [[nodiscard]] virtual const VectorMap& map() const = 0;
  [[nodiscard]] virtual const NavGraph& graph() const = 0;
  [[nodiscard]] virtual int max_agents() const = 0;
  virtual std::vector<Route> sample_agent_routes(int k, CounterRng& rng) const = 0;
  [[nodiscard]] virtual std::vector<Route> human_routes() const { return {}; }
};

class MiniGame final : public ScenarioSource {
 public:
  MiniGame(std::string id, MiniGameParams params, VectorMap map, NavGraph graph, RouteSampler sampler)
      : id_(std::move(id)), params_(params), map_(std::move(map)), graph_(std::move(graph)),
        sampler_(std::move(sampler)) {}

  [[nodiscard]] const std::string& id() const override { return id_; }
  [[nodiscard]] const VectorMap& map() const override { return map_; }
  [[nodiscard]] const NavGraph& graph() const override { return graph_; }
  [[nodiscard]] int max_agents() const override { return sampler_.max_agents(); }
  std::vector<Route> sample_agent_routes(int k, CounterRng& rng) const override { return sampler_.sample(k, rng); }

  [[nodiscard]] const MiniGameParams& params() const { return params_; }
  [[nodiscard]] const RouteSampler& sampler() const { return sampler_; }

 private:
  std::string id_;
  MiniGameParams params_;
  VectorMap map_;
  NavGraph graph_;
  RouteSampler sampler_;
};

/// Fixed routes loaded from a scenario file. With `randomize`, episodes use
/// a random k-subset of the routes (in file order); otherwise the first k.
class FileScenario final : public ScenarioSource {
 public:
  FileScenario(std::string id, VectorMap map, NavGraph graph, Scenario scenario, bool randomize = true);

  [[nodiscard]] const std::string& id() const override { return id_; }
  [[nodiscard]] const VectorMap& map() const override { return map_; }
  [[nodiscard]] const NavGraph& graph() const override { return graph_; }
  [[nodiscard]] int max_agents() const override { return static_cast<int>(scenario_.agent_routes.size()); }
  std::vector<Route> sample_agent_routes(int k, CounterRng& rng) const override;
  [[nodiscard]] std::vector<Route> human_routes() const override { return scenario_.human_routes; }
  [[nodiscard]] const Scenario& scenario() const { return scenario_; }

 private:
  std::string id_;
  VectorMap map_;
  NavGraph graph_;
  Scenario scenario_;
  bool randomize_;
};

/// Build the map, graph and route sampler for one mini-game. Throws ConfigError.
std::shared_ptr<MiniGame> generate(const MiniGameParams& params);
inline std::shared_ptr<MiniGame> generate(MiniGameKind kind) { return generate(default_params(kind)); }

/// A scenario file snapshot of the sampler's output for k agents.
Scenario to_scenario(const ScenarioSource& source, int k, CounterRng& rng);

using ScenarioSet = std::vector<std::shared_ptr<const ScenarioSource>>;

}  // namespace minisocial
