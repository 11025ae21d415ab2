#include "minisocial/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <set>

namespace minisocial {

std::string_view to_string(MiniGameKind k) {
  switch (k) {
    case MiniGameKind::Open: return "open";
    case MiniGameKind::Doorway: return "doorway";
    case MiniGameKind::Hallway: return "hallway";
    case MiniGameKind::Intersection: return "intersection";
    case MiniGameKind::Roundabout: return "roundabout";
  }
  return "";
}

std::optional<MiniGameKind> mini_game_from_string(std::string_view s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower.starts_with("envs_")) lower = lower.substr(5);
  if (lower == "open") return MiniGameKind::Open;
  if (lower == "doorway" || lower == "door") return MiniGameKind::Doorway;
  if (lower == "hallway" || lower == "hall") return MiniGameKind::Hallway;
  if (lower == "intersection") return MiniGameKind::Intersection;
  if (lower == "roundabout") return MiniGameKind::Roundabout;
  return std::nullopt;
}

void MiniGameParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("mini-game ") + name + " must be > 0");
  };
  positive(scale, "scale");
  positive(corridor_width, "corridor_width");
  positive(gap_width, "gap_width");
  positive(ring_radius, "ring_radius");
  positive(length, "length");
  if (max_agents < 1) throw ConfigError("mini-game max_agents must be >= 1");
  if (arm_count < 3 || arm_count > 8) throw ConfigError("mini-game arm_count must be in [3, 8]");
  if (kind == MiniGameKind::Doorway && gap_width >= scale) throw ConfigError("doorway gap wider than the room");
  if (kind == MiniGameKind::Roundabout && corridor_width / 2 >= ring_radius) {
    throw ConfigError("roundabout spur wider than the ring");
  }
}

MiniGameParams default_params(MiniGameKind kind) {
  MiniGameParams p;
  p.kind = kind;
  switch (kind) {
    case MiniGameKind::Open:
      p.scale = 12.0;
      break;
    case MiniGameKind::Doorway:
      p.scale = 12.0;
      p.gap_width = 1.0;
      break;
    case MiniGameKind::Hallway:
      p.scale = 12.0;
      p.corridor_width = 1.0;
      p.length = 20.0;
      break;
    case MiniGameKind::Intersection:
      p.scale = 10.0;
      p.corridor_width = 1.1;
      p.length = 8.0;
      break;
    case MiniGameKind::Roundabout:
      p.scale = 10.0;
      p.corridor_width = 1.0;
      p.ring_radius = 2.0;
      p.length = 6.0;
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// RouteSampler

RouteSampler::RouteSampler(std::vector<std::vector<std::vector<NodeId>>> groups, std::vector<Variant> variants,
                           int max_agents)
    : groups_(std::move(groups)), variants_(std::move(variants)), max_agents_(max_agents) {
  if (variants_.empty()) throw ConfigError("route sampler needs at least one variant");
  for (const auto& v : variants_) {
    if (v.core.size() != groups_.size()) throw ConfigError("route sampler variant size mismatch");
  }
}

std::size_t RouteSampler::slot_count() const {
  std::size_t n = 0;
  for (const auto& g : groups_) n += g.size();
  return n;
}

Route RouteSampler::build(const Variant& v, std::size_t a, std::size_t s, std::size_t b, std::size_t g) const {
  Route r;
  const auto& out = groups_[a][s];
  r.node_ids.insert(r.node_ids.end(), out.begin(), out.end());
  const auto& core = *v.core[a][b];
  r.node_ids.insert(r.node_ids.end(), core.begin(), core.end());
  const auto& in = groups_[b][g];
  r.node_ids.insert(r.node_ids.end(), in.rbegin(), in.rend());
  return r;
}

std::vector<Route> RouteSampler::sample(int k, CounterRng& rng) const {
  if (k < 1) throw ConfigError("need at least one agent");
  if (k > max_agents_) {
    throw ConfigError("layout supports at most " + std::to_string(max_agents_) + " agents, asked for " +
                      std::to_string(k));
  }
  using Slot = std::pair<std::size_t, std::size_t>;
  constexpr int kAttempts = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const Variant& v = variants_[rng.below(variants_.size())];
    std::vector<Slot> starts;
    for (std::size_t a = 0; a < groups_.size(); ++a) {
      const bool any = std::any_of(v.core[a].begin(), v.core[a].end(), [](const auto& c) { return c.has_value(); });
      if (!any) continue;
      for (std::size_t s = 0; s < groups_[a].size(); ++s) starts.emplace_back(a, s);
    }
    if (static_cast<int>(starts.size()) < k) continue;
    rng.shuffle(std::span<Slot>(starts));
    starts.resize(static_cast<std::size_t>(k));

    std::set<Slot> used_goals;
    std::vector<Route> routes;
    bool ok = true;
    for (const auto& [a, s] : starts) {
      std::vector<Slot> goals;
      for (std::size_t b = 0; b < groups_.size(); ++b) {
        if (!v.core[a][b]) continue;
        for (std::size_t g = 0; g < groups_[b].size(); ++g) {
          if (!used_goals.contains({b, g})) goals.emplace_back(b, g);
        }
      }
      if (goals.empty()) {
        ok = false;
        break;
      }
      const Slot goal = goals[rng.below(goals.size())];
      used_goals.insert(goal);
      routes.push_back(build(v, a, s, goal.first, goal.second));
    }
    if (ok) return routes;
  }
  throw ConfigError("could not find a route assignment for " + std::to_string(k) + " agents");
}

// ---------------------------------------------------------------------------
// FileScenario

FileScenario::FileScenario(std::string id, VectorMap map, NavGraph graph, Scenario scenario, bool randomize)
    : id_(std::move(id)), map_(std::move(map)), graph_(std::move(graph)), scenario_(std::move(scenario)),
      randomize_(randomize) {
  auto problems = validate_scenario(scenario_, graph_);
  if (!problems.empty()) throw ConfigError("scenario '" + id_ + "': " + problems.front());
}

std::vector<Route> FileScenario::sample_agent_routes(int k, CounterRng& rng) const {
  const auto n = scenario_.agent_routes.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw ConfigError("scenario '" + id_ + "' has " + std::to_string(n) + " routes, asked for " + std::to_string(k));
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (randomize_) {
    rng.shuffle(std::span<std::size_t>(idx));
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
  } else {
    idx.resize(static_cast<std::size_t>(k));
  }
  std::vector<Route> out;
  for (auto i : idx) out.push_back(scenario_.agent_routes[i]);
  return out;
}

Scenario to_scenario(const ScenarioSource& source, int k, CounterRng& rng) {
  Scenario sc;
  sc.map_ref = source.map().name;
  sc.graph_ref = source.map().name;
  sc.agent_routes = source.sample_agent_routes(k, rng);
  sc.human_routes = source.human_routes();
  return sc;
}

// ---------------------------------------------------------------------------
// Layout construction

namespace {

struct Builder {
  VectorMap map;
  NavGraph graph;
  NodeId next_id = 0;

  NodeId node(Vec2 p) {
    graph.add_node(next_id, p);
    return next_id++;
  }
  void edge(NodeId a, NodeId b) { graph.add_edge(a, b); }
  void wall(Vec2 a, Vec2 b) { map.segments.push_back({a, b}); }
  void chain(const std::vector<NodeId>& ids) {
    for (std::size_t i = 1; i < ids.size(); ++i) edge(ids[i - 1], ids[i]);
  }
};

Vec2 rot(Vec2 p, double angle) { return p.rotated(angle); }

using Groups = std::vector<std::vector<std::vector<NodeId>>>;

RouteSampler::Variant all_pairs(std::size_t n, bool bidirectional) {
  RouteSampler::Variant v;
  v.core.assign(n, std::vector<std::optional<std::vector<NodeId>>>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && (bidirectional || a < b)) v.core[a][b] = std::vector<NodeId>{};
    }
  }
  return v;
}

// Five slots in a room of side `size` whose mouth sits at x = mouth on the
// local +x axis. Returns slot paths ending at the approach node (appended to
// `tail`, which continues toward the junction).
std::vector<std::vector<NodeId>> room_slots(Builder& b, double angle, double mouth, double size,
                                            const std::vector<NodeId>& tail) {
  const NodeId approach = b.node(rot({mouth + 1.5, 0.0}, angle));
  if (!tail.empty()) b.edge(approach, tail.front());
  const double spacing = std::min(1.0, (size - 1.0) / 4.0);
  std::vector<std::vector<NodeId>> paths;
  for (int i = -2; i <= 2; ++i) {
    const NodeId slot = b.node(rot({mouth + size - 1.5, spacing * i}, angle));
    b.edge(slot, approach);
    std::vector<NodeId> path{slot, approach};
    path.insert(path.end(), tail.begin(), tail.end());
    paths.push_back(std::move(path));
  }
  return paths;
}

// Room walls around a mouth opening of half-width h at x = mouth.
void room_walls(Builder& b, double angle, double mouth, double size, double h) {
  const double half = size / 2.0;
  b.wall(rot({mouth, h}, angle), rot({mouth, half}, angle));
  b.wall(rot({mouth, -half}, angle), rot({mouth, -h}, angle));
  b.wall(rot({mouth, half}, angle), rot({mouth + size, half}, angle));
  b.wall(rot({mouth, -half}, angle), rot({mouth + size, -half}, angle));
  b.wall(rot({mouth + size, -half}, angle), rot({mouth + size, half}, angle));
}

void box_walls(Builder& b, double x0, double y0, double x1, double y1) {
  b.wall({x0, y0}, {x1, y0});
  b.wall({x1, y0}, {x1, y1});
  b.wall({x1, y1}, {x0, y1});
  b.wall({x0, y1}, {x0, y0});
}

std::shared_ptr<MiniGame> finish(const MiniGameParams& p, Builder& b, Groups groups,
                                 std::vector<RouteSampler::Variant> variants) {
  const std::string name(to_string(p.kind));
  b.map.name = name;
  b.graph.set_map_name(name);
  // slots that can start, and slots that can be a goal, in the best variant
  int capacity = 0;
  for (const auto& v : variants) {
    int starts = 0, goals = 0;
    for (std::size_t a = 0; a < groups.size(); ++a) {
      bool out = false, in = false;
      for (std::size_t c = 0; c < groups.size(); ++c) {
        out = out || v.core[a][c].has_value();
        in = in || v.core[c][a].has_value();
      }
      if (out) starts += static_cast<int>(groups[a].size());
      if (in) goals += static_cast<int>(groups[a].size());
    }
    capacity = std::max(capacity, std::min(starts, goals));
  }
  RouteSampler sampler(std::move(groups), std::move(variants), std::min(p.max_agents, capacity));
  return std::make_shared<MiniGame>(name, p, std::move(b.map), std::move(b.graph), std::move(sampler));
}

// Straight one-way lanes across the box. Vertical lanes sit at x = 2 mod 4
// and horizontal lanes at y = 0 mod 4, so two agents on crossing lanes reach
// the crossing at least 2 m apart.
std::shared_ptr<MiniGame> make_open(const MiniGameParams& p) {
  Builder b;
  const double half = p.scale / 2.0;
  box_walls(b, -half, -half, half, half);
  const double end = half - 0.5;
  const double reach = half - 1.5;

  std::vector<std::pair<NodeId, NodeId>> lanes;  // (start, goal)
  auto add_lane = [&](Vec2 from, Vec2 to) {
    const NodeId s = b.node(from);
    const NodeId g = b.node(to);
    b.edge(s, g);
    lanes.emplace_back(s, g);
  };
  int i = 0;
  constexpr double kLane = 4.0;
  for (double x = -kLane / 2 - kLane * std::floor((reach - kLane / 2) / kLane); x <= reach + 1e-9; x += kLane, ++i) {
    if (i % 2 == 0 || !p.bidirectional) {
      add_lane({x, end}, {x, -end});
    } else {
      add_lane({x, -end}, {x, end});
    }
  }
  i = 0;
  for (double y = -kLane * std::floor(reach / kLane); y <= reach + 1e-9; y += kLane, ++i) {
    if (i % 2 == 0 || !p.bidirectional) {
      add_lane({-end, y}, {end, y});
    } else {
      add_lane({end, y}, {-end, y});
    }
  }

  Groups groups;
  for (const auto& [s, g] : lanes) {
    groups.push_back({{s}});
    groups.push_back({{g}});
  }
  RouteSampler::Variant v;
  v.core.assign(groups.size(), std::vector<std::optional<std::vector<NodeId>>>(groups.size()));
  for (std::size_t l = 0; l < lanes.size(); ++l) v.core[2 * l][2 * l + 1] = std::vector<NodeId>{};
  return finish(p, b, std::move(groups), {v});
}

std::shared_ptr<MiniGame> make_doorway(const MiniGameParams& p) {
  Builder b;
  const double half = p.scale / 2.0;
  box_walls(b, -half, -half, half, half);
  const double g = p.gap_width / 2.0;
  b.wall({0.0, -half}, {0.0, -g});
  b.wall({0.0, g}, {0.0, half});

  const NodeId gap = b.node({0.0, 0.0});
  const double ap = 1.0;
  const NodeId left = b.node({-ap, 0.0});
  const NodeId right = b.node({ap, 0.0});
  b.edge(left, gap);
  b.edge(gap, right);

  Groups groups(2);
  // slots sit close to the divider so queues form right at the gap
  const double slot_x = half / 2.0;
  const double spacing = p.scale / 12.0;
  for (int side = 0; side < 2; ++side) {
    const double sx = side == 0 ? -slot_x : slot_x;
    const NodeId approach = side == 0 ? left : right;
    for (int i = -2; i <= 2; ++i) {
      const NodeId slot = b.node({sx, spacing * i});
      b.edge(slot, approach);
      groups[side].push_back({slot, approach});
    }
  }
  auto v = all_pairs(2, p.bidirectional);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t c = 0; c < 2; ++c) {
      if (v.core[a][c]) v.core[a][c] = std::vector<NodeId>{gap};
    }
  }
  return finish(p, b, std::move(groups), {v});
}

std::shared_ptr<MiniGame> make_hallway(const MiniGameParams& p) {
  Builder b;
  const double h = p.corridor_width / 2.0;
  const double half_len = p.length / 2.0;
  const double room = p.scale / 2.0;
  b.wall({-half_len, h}, {half_len, h});
  b.wall({-half_len, -h}, {half_len, -h});
  room_walls(b, 0.0, half_len, room, h);
  room_walls(b, std::numbers::pi, half_len, room, h);

  std::vector<NodeId> corridor;
  const int pieces = std::max(1, static_cast<int>(std::ceil(p.length / 5.0)));
  for (int i = 0; i <= pieces; ++i) corridor.push_back(b.node({-half_len + p.length * i / pieces, 0.0}));
  b.chain(corridor);

  Groups groups(2);
  groups[0] = room_slots(b, std::numbers::pi, half_len, room, {corridor.front()});
  groups[1] = room_slots(b, 0.0, half_len, room, {corridor.back()});
  // slot paths end on the corridor mouths, so the core is the corridor interior
  auto v = all_pairs(2, p.bidirectional);
  const std::vector<NodeId> inner(corridor.begin() + 1, corridor.end() - 1);
  if (v.core[0][1]) v.core[0][1] = inner;
  if (v.core[1][0]) v.core[1][0] = std::vector<NodeId>(inner.rbegin(), inner.rend());
  return finish(p, b, std::move(groups), {v});
}

std::shared_ptr<MiniGame> make_intersection(const MiniGameParams& p) {
  Builder b;
  const int n = p.arm_count;
  const double h = p.corridor_width / 2.0;
  const double sep = 2.0 * std::numbers::pi / n;
  const double start = h / std::tan(sep / 2.0);
  const double mouth = p.length;
  const double room = p.scale / 2.0;
  if (start + 1.0 >= mouth) throw ConfigError("intersection arms too short for their width");

  const NodeId center = b.node({0.0, 0.0});
  Groups groups(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double ang = sep * i;
    b.wall(rot({start, h}, ang), rot({mouth, h}, ang));
    b.wall(rot({start, -h}, ang), rot({mouth, -h}, ang));
    room_walls(b, ang, mouth, room, h);
    const NodeId mid = b.node(rot({mouth / 2.0, 0.0}, ang));
    const NodeId end = b.node(rot({mouth, 0.0}, ang));
    b.edge(center, mid);
    b.edge(mid, end);
    groups[static_cast<std::size_t>(i)] = room_slots(b, ang, mouth, room, {end, mid});
  }
  auto v = all_pairs(static_cast<std::size_t>(n), p.bidirectional);
  for (auto& row : v.core) {
    for (auto& c : row) {
      if (c) c = std::vector<NodeId>{center};
    }
  }
  return finish(p, b, std::move(groups), {v});
}

std::shared_ptr<MiniGame> make_roundabout(const MiniGameParams& p) {
  Builder b;
  const int n = p.arm_count;
  const int ring_n = 2 * n;
  const double h = p.corridor_width / 2.0;
  // lane between island and outer wall is slightly wider than a spur
  const double island = p.ring_radius - 0.55 * p.corridor_width;
  const double outer = p.ring_radius + 0.5 * p.corridor_width;
  const double mouth = p.length;
  const double room = p.scale / 2.0;
  if (std::sqrt(outer * outer - h * h) + 1.0 >= mouth) throw ConfigError("roundabout spurs too short");

  // island: regular 16-gon inscribed in a circle of radius `island`
  constexpr int kIslandSides = 16;
  for (int i = 0; i < kIslandSides; ++i) {
    const double a0 = 2.0 * std::numbers::pi * i / kIslandSides;
    const double a1 = 2.0 * std::numbers::pi * (i + 1) / kIslandSides;
    b.wall(Vec2{island, 0.0}.rotated(a0), Vec2{island, 0.0}.rotated(a1));
  }
  // outer wall: arcs between spur openings
  const double sep = 2.0 * std::numbers::pi / n;
  const double gap_half = std::asin(h / outer);
  constexpr int kArcPieces = 6;
  for (int i = 0; i < n; ++i) {
    const double from = sep * i + gap_half;
    const double to = sep * (i + 1) - gap_half;
    for (int k = 0; k < kArcPieces; ++k) {
      const double a0 = from + (to - from) * k / kArcPieces;
      const double a1 = from + (to - from) * (k + 1) / kArcPieces;
      b.wall(Vec2{outer, 0.0}.rotated(a0), Vec2{outer, 0.0}.rotated(a1));
    }
  }
  // ring nodes, counter-clockwise; spur i joins ring node 2i
  std::vector<NodeId> ring;
  for (int j = 0; j < ring_n; ++j) {
    ring.push_back(b.node(Vec2{p.ring_radius, 0.0}.rotated(2.0 * std::numbers::pi * j / ring_n)));
  }
  for (int j = 0; j < ring_n; ++j) b.edge(ring[static_cast<std::size_t>(j)], ring[static_cast<std::size_t>((j + 1) % ring_n)]);

  const double spur_start = std::sqrt(outer * outer - h * h);
  Groups groups(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double ang = sep * i;
    b.wall(rot({spur_start, h}, ang), rot({mouth, h}, ang));
    b.wall(rot({spur_start, -h}, ang), rot({mouth, -h}, ang));
    room_walls(b, ang, mouth, room, h);
    const NodeId mid = b.node(rot({(spur_start + mouth) / 2.0, 0.0}, ang));
    const NodeId end = b.node(rot({mouth, 0.0}, ang));
    b.edge(ring[static_cast<std::size_t>(2 * i)], mid);
    b.edge(mid, end);
    groups[static_cast<std::size_t>(i)] = room_slots(b, ang, mouth, room, {end, mid});
  }

  // One variant per conflict node (the ring node between two spurs): every
  // allowed route travels counter-clockwise through it.
  std::vector<RouteSampler::Variant> variants;
  for (int c = 0; c < n; ++c) {
    const int conflict = 2 * c + 1;
    RouteSampler::Variant v;
    v.core.assign(static_cast<std::size_t>(n), std::vector<std::optional<std::vector<NodeId>>>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a) {
      for (int e = 0; e < n; ++e) {
        if (a == e) continue;
        const int span = ((2 * e - 2 * a) % ring_n + ring_n) % ring_n;
        const int to_conflict = ((conflict - 2 * a) % ring_n + ring_n) % ring_n;
        if (to_conflict >= span) continue;
        std::vector<NodeId> arc;
        for (int j = 0; j <= span; ++j) arc.push_back(ring[static_cast<std::size_t>((2 * a + j) % ring_n)]);
        v.core[static_cast<std::size_t>(a)][static_cast<std::size_t>(e)] = std::move(arc);
      }
    }
    variants.push_back(std::move(v));
  }
  return finish(p, b, std::move(groups), std::move(variants));
}

}  // namespace

std::shared_ptr<MiniGame> generate(const MiniGameParams& params) {
  params.validate();
  switch (params.kind) {
    case MiniGameKind::Open: return make_open(params);
    case MiniGameKind::Doorway: return make_doorway(params);
    case MiniGameKind::Hallway: return make_hallway(params);
    case MiniGameKind::Intersection: return make_intersection(params);
    case MiniGameKind::Roundabout: return make_roundabout(params);
  }
  throw ConfigError("unknown mini-game kind");
}

}  // namespace minisocial
