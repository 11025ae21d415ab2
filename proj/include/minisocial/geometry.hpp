#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace minisocial {

/// Tolerance for geometric predicates, in meters.
inline constexpr double kGeomEps = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  [[nodiscard]] constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  [[nodiscard]] constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] constexpr double squared_norm() const { return x * x + y * y; }
  [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }
  /// Rotate by angle (radians, counter-clockwise).
  [[nodiscard]] Vec2 rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

struct Segment {
  Vec2 a;
  Vec2 b;
  bool operator==(const Segment&) const = default;
  [[nodiscard]] double length() const { return distance(a, b); }
};

struct VectorMap {
  std::string name;
  std::vector<Segment> segments;
  bool operator==(const VectorMap&) const = default;
};

using NodeId = int;

struct NavNode {
  NodeId id = 0;
  Vec2 position;
  bool operator==(const NavNode&) const = default;
};

/// Undirected waypoint graph.
class NavGraph {
 public:
  NavGraph() = default;
  explicit NavGraph(std::string map_name) : map_name_(std::move(map_name)) {}

  /// Throws std::invalid_argument on a duplicate id.
  void add_node(NodeId id, Vec2 position);
  /// Throws std::invalid_argument on unknown ids or a self-loop.
  void add_edge(NodeId a, NodeId b);

  [[nodiscard]] bool has_node(NodeId id) const { return index_.contains(id); }
  [[nodiscard]] bool has_edge(NodeId a, NodeId b) const;
  /// Throws std::out_of_range for unknown ids.
  [[nodiscard]] Vec2 position(NodeId id) const;

  [[nodiscard]] const std::vector<NavNode>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }
  [[nodiscard]] const std::string& map_name() const { return map_name_; }
  void set_map_name(std::string name) { map_name_ = std::move(name); }

  bool operator==(const NavGraph& o) const {
    return map_name_ == o.map_name_ && nodes_ == o.nodes_ && edges_ == o.edges_;
  }

 private:
  std::string map_name_;
  std::vector<NavNode> nodes_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::unordered_map<NodeId, std::size_t> index_;
};

struct Route {
  std::vector<NodeId> node_ids;
  bool operator==(const Route&) const = default;
};

struct Scenario {
  std::string map_ref;
  std::string graph_ref;
  std::vector<Route> agent_routes;
  std::vector<Route> human_routes;
  bool operator==(const Scenario&) const = default;
};

/// Intersection point of two closed segments. Collinear overlaps return the
/// midpoint of the shared interval.
std::optional<Vec2> segments_intersect(const Segment& s1, const Segment& s2);

Vec2 closest_point_on_segment(Vec2 p, const Segment& s);
double distance_point_segment(Vec2 p, const Segment& s);

/// Smallest distance from p to any wall; +inf for an empty map.
double distance_to_walls(Vec2 p, std::span<const Segment> walls);

/// Edges of the graph that cross at least one wall segment.
std::vector<std::pair<NodeId, NodeId>> validate_graph(const VectorMap& map, const NavGraph& graph);

/// Human-readable problems with a route against a graph; empty when valid.
std::vector<std::string> validate_route(const Route& route, const NavGraph& graph);
std::vector<std::string> validate_scenario(const Scenario& scenario, const NavGraph& graph);

std::vector<Vec2> route_polyline(const Route& route, const NavGraph& graph);

/// A point lying on every route polyline (shared node first, then shared
/// edge points), or nullopt when the routes have no common point.
std::optional<Vec2> find_common_point(std::span<const Route> routes, const NavGraph& graph);
std::optional<Vec2> find_common_point(const Scenario& scenario, const NavGraph& graph);

/// Distance from p to the polyline through pts.
double distance_point_polyline(Vec2 p, std::span<const Vec2> pts);

}  // namespace minisocial
