#include "minisocial/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace minisocial {

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

void NavGraph::add_node(NodeId id, Vec2 position) {
  if (index_.contains(id)) throw std::invalid_argument("duplicate node id " + std::to_string(id));
  index_.emplace(id, nodes_.size());
  nodes_.push_back({id, position});
}

void NavGraph::add_edge(NodeId a, NodeId b) {
  if (!has_node(a)) throw std::invalid_argument("edge references unknown node " + std::to_string(a));
  if (!has_node(b)) throw std::invalid_argument("edge references unknown node " + std::to_string(b));
  if (a == b) throw std::invalid_argument("self-loop edge on node " + std::to_string(a));
  edges_.emplace_back(a, b);
}

bool NavGraph::has_edge(NodeId a, NodeId b) const {
  return std::any_of(edges_.begin(), edges_.end(), [&](const auto& e) {
    return (e.first == a && e.second == b) || (e.first == b && e.second == a);
  });
}

Vec2 NavGraph::position(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown node id " + std::to_string(id));
  return nodes_[it->second].position;
}

namespace {

bool lex_less(Vec2 p, Vec2 q) { return std::tie(p.x, p.y) < std::tie(q.x, q.y); }

Segment canonical(const Segment& s) { return lex_less(s.b, s.a) ? Segment{s.b, s.a} : s; }

// Overlap of two collinear segments as parameters along s1 (nullopt when disjoint).
std::optional<std::pair<Vec2, Vec2>> collinear_overlap(const Segment& s1, const Segment& s2) {
  const Vec2 r = s1.b - s1.a;
  const double rr = r.dot(r);
  if (rr == 0.0) {
    if (distance_point_segment(s1.a, s2) <= kGeomEps) return std::pair{s1.a, s1.a};
    return std::nullopt;
  }
  double t0 = (s2.a - s1.a).dot(r) / rr;
  double t1 = (s2.b - s1.a).dot(r) / rr;
  if (t0 > t1) std::swap(t0, t1);
  const double tol = kGeomEps / std::sqrt(rr);
  const double lo = std::max(t0, 0.0);
  const double hi = std::min(t1, 1.0);
  if (lo > hi + tol) return std::nullopt;
  const double l = std::min(lo, hi), h = std::max(lo, hi);
  return std::pair{s1.a + r * l, s1.a + r * h};
}

bool is_collinear(const Segment& s1, const Segment& s2) {
  const Vec2 r = s1.b - s1.a;
  const double len = r.norm();
  if (len == 0.0) return false;
  return std::abs(r.cross(s2.a - s1.a)) / len <= kGeomEps &&
         std::abs(r.cross(s2.b - s1.a)) / len <= kGeomEps;
}

}  // namespace

std::optional<Vec2> segments_intersect(const Segment& in1, const Segment& in2) {
  // canonical ordering makes the result bit-identical under argument swap
  Segment s1 = canonical(in1), s2 = canonical(in2);
  if (std::tie(s2.a.x, s2.a.y, s2.b.x, s2.b.y) < std::tie(s1.a.x, s1.a.y, s1.b.x, s1.b.y)) {
    std::swap(s1, s2);
  }
  const Vec2 r = s1.b - s1.a;
  const Vec2 s = s2.b - s2.a;
  const Vec2 qp = s2.a - s1.a;
  const double denom = r.cross(s);
  const double rlen = r.norm(), slen = s.norm();

  if (rlen == 0.0 || slen == 0.0 || std::abs(denom) <= 1e-12 * rlen * slen) {
    if (rlen == 0.0 && slen == 0.0) {
      if (distance(s1.a, s2.a) <= kGeomEps) return s1.a;
      return std::nullopt;
    }
    if (rlen == 0.0) {
      if (distance_point_segment(s1.a, s2) <= kGeomEps) return s1.a;
      return std::nullopt;
    }
    if (slen == 0.0) {
      if (distance_point_segment(s2.a, s1) <= kGeomEps) return s2.a;
      return std::nullopt;
    }
    if (!is_collinear(s1, s2)) return std::nullopt;
    auto overlap = collinear_overlap(s1, s2);
    if (!overlap) return std::nullopt;
    return (overlap->first + overlap->second) * 0.5;
  }

  const double t = qp.cross(s) / denom;
  const double u = qp.cross(r) / denom;
  const double tt = kGeomEps / rlen, tu = kGeomEps / slen;
  if (t < -tt || t > 1.0 + tt || u < -tu || u > 1.0 + tu) return std::nullopt;
  return s1.a + r * std::clamp(t, 0.0, 1.0);
}

Vec2 closest_point_on_segment(Vec2 p, const Segment& s) {
  const Vec2 d = s.b - s.a;
  const double dd = d.dot(d);
  if (dd == 0.0) return s.a;
  const double t = std::clamp((p - s.a).dot(d) / dd, 0.0, 1.0);
  return s.a + d * t;
}

double distance_point_segment(Vec2 p, const Segment& s) {
  return distance(p, closest_point_on_segment(p, s));
}

double distance_to_walls(Vec2 p, std::span<const Segment> walls) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : walls) best = std::min(best, distance_point_segment(p, w));
  return best;
}

std::vector<std::pair<NodeId, NodeId>> validate_graph(const VectorMap& map, const NavGraph& graph) {
  std::vector<std::pair<NodeId, NodeId>> violations;
  for (const auto& [a, b] : graph.edges()) {
    const Segment edge{graph.position(a), graph.position(b)};
    for (const auto& wall : map.segments) {
      if (segments_intersect(edge, wall)) {
        violations.emplace_back(a, b);
        break;
      }
    }
  }
  return violations;
}

std::vector<std::string> validate_route(const Route& route, const NavGraph& graph) {
  std::vector<std::string> problems;
  if (route.node_ids.size() < 2) {
    problems.push_back("route has fewer than 2 nodes");
  }
  for (NodeId id : route.node_ids) {
    if (!graph.has_node(id)) problems.push_back("route references unknown node " + std::to_string(id));
  }
  for (std::size_t i = 1; i < route.node_ids.size(); ++i) {
    const NodeId a = route.node_ids[i - 1], b = route.node_ids[i];
    if (graph.has_node(a) && graph.has_node(b) && !graph.has_edge(a, b)) {
      problems.push_back("route step " + std::to_string(a) + "->" + std::to_string(b) + " is not a graph edge");
    }
  }
  return problems;
}

std::vector<std::string> validate_scenario(const Scenario& scenario, const NavGraph& graph) {
  std::vector<std::string> problems;
  if (scenario.agent_routes.empty()) problems.push_back("scenario has no agent routes");
  auto check = [&](const std::vector<Route>& routes, const char* what) {
    for (std::size_t i = 0; i < routes.size(); ++i) {
      for (auto& p : validate_route(routes[i], graph)) {
        problems.push_back(std::string(what) + " " + std::to_string(i) + ": " + p);
      }
    }
  };
  check(scenario.agent_routes, "agent");
  check(scenario.human_routes, "human");
  return problems;
}

std::vector<Vec2> route_polyline(const Route& route, const NavGraph& graph) {
  std::vector<Vec2> pts;
  pts.reserve(route.node_ids.size());
  for (NodeId id : route.node_ids) pts.push_back(graph.position(id));
  return pts;
}

double distance_point_polyline(Vec2 p, std::span<const Vec2> pts) {
  if (pts.empty()) return std::numeric_limits<double>::infinity();
  if (pts.size() == 1) return distance(p, pts[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    best = std::min(best, distance_point_segment(p, {pts[i - 1], pts[i]}));
  }
  return best;
}

std::optional<Vec2> find_common_point(std::span<const Route> routes, const NavGraph& graph) {
  if (routes.empty()) return std::nullopt;
  std::vector<std::vector<Vec2>> lines;
  lines.reserve(routes.size());
  for (const auto& r : routes) lines.push_back(route_polyline(r, graph));
  if (lines[0].empty()) return std::nullopt;

  auto on_all = [&](Vec2 p) {
    return std::all_of(lines.begin() + 1, lines.end(),
                       [&](const auto& l) { return distance_point_polyline(p, l) <= kGeomEps; });
  };

  // Shared nodes along the first route; the middle one is reported so that a
  // run of shared nodes (a corridor) resolves to its centre.
  std::vector<Vec2> shared;
  for (Vec2 p : lines[0]) {
    if (on_all(p) && std::find(shared.begin(), shared.end(), p) == shared.end()) shared.push_back(p);
  }
  if (!shared.empty()) return shared[shared.size() / 2];
  if (lines.size() == 1) return lines[0].front();

  // Edge interior points: crossings and collinear overlaps between the first two routes.
  const auto& l0 = lines[0];
  const auto& l1 = lines[1];
  for (std::size_t i = 1; i < l0.size(); ++i) {
    const Segment e{l0[i - 1], l0[i]};
    for (std::size_t j = 1; j < l1.size(); ++j) {
      const Segment f{l1[j - 1], l1[j]};
      std::vector<Vec2> candidates;
      if (is_collinear(e, f)) {
        if (auto ov = collinear_overlap(e, f)) {
          candidates = {(ov->first + ov->second) * 0.5, ov->first, ov->second};
        }
      } else if (auto p = segments_intersect(e, f)) {
        candidates = {*p};
      }
      for (Vec2 c : candidates) {
        if (on_all(c)) return c;
      }
    }
  }
  return std::nullopt;
}

std::optional<Vec2> find_common_point(const Scenario& scenario, const NavGraph& graph) {
  return find_common_point(std::span<const Route>(scenario.agent_routes), graph);
}

}  // namespace minisocial
