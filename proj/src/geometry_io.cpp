#include "minisocial/geometry_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "minisocial/json_util.hpp"

namespace minisocial {

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& msg) {
  throw GeometryError(GeometryError::Kind::Parse, field + ": " + msg);
}

[[noreturn]] void semantic_fail(const std::string& msg) {
  throw GeometryError(GeometryError::Kind::Semantic, msg);
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // translate the byte offset into a line number
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw GeometryError(GeometryError::Kind::Parse, "line " + std::to_string(line) + ": " + e.what());
  }
}

void check_header(const json& doc) {
  if (!doc.is_object()) parse_fail("<root>", "expected an object");
  if (!doc.contains("format_version")) parse_fail("format_version", "missing");
  const auto& v = doc["format_version"];
  if (!v.is_number_integer()) parse_fail("format_version", "expected an integer");
  if (v.get<int>() != kFormatVersion) {
    parse_fail("format_version", "unsupported version " + std::to_string(v.get<int>()));
  }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) parse_fail(path + key, "missing");
  return obj[key];
}

std::string get_string(const json& obj, const std::string& key) {
  const auto& v = require(obj, key, "");
  if (!v.is_string()) parse_fail(key, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) parse_fail(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) parse_fail(field, "non-finite value");
  return d;
}

Vec2 get_point(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) parse_fail(field, "expected [x, y]");
  return {get_number(v[0], field + "[0]"), get_number(v[1], field + "[1]")};
}

json point_json(Vec2 p) { return json::array({round9(p.x), round9(p.y)}); }

Route get_route(const json& entry, const std::string& field) {
  if (!entry.is_object()) parse_fail(field, "expected an object");
  const auto& r = require(entry, "route", field + ".");
  if (!r.is_array()) parse_fail(field + ".route", "expected a list of node ids");
  Route route;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r[i].is_number_integer()) parse_fail(field + ".route[" + std::to_string(i) + "]", "expected an integer");
    route.node_ids.push_back(r[i].get<int>());
  }
  if (route.node_ids.size() < 2) semantic_fail(field + ".route: a route needs at least 2 nodes");
  return route;
}

json routes_json(const std::vector<Route>& routes) {
  json arr = json::array();
  for (const auto& r : routes) arr.push_back(json{{"route", r.node_ids}});
  return arr;
}

}  // namespace

std::string map_to_json(const VectorMap& map) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["name"] = map.name;
  json segs = json::array();
  for (const auto& s : map.segments) segs.push_back(json::array({point_json(s.a), point_json(s.b)}));
  doc["segments"] = std::move(segs);
  return doc.dump(1) + "\n";
}

std::string graph_to_json(const NavGraph& graph) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["map"] = graph.map_name();
  json nodes = json::array();
  for (const auto& n : graph.nodes()) nodes.push_back(json{{"id", n.id}, {"p", point_json(n.position)}});
  doc["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& [a, b] : graph.edges()) edges.push_back(json::array({a, b}));
  doc["edges"] = std::move(edges);
  return doc.dump(1) + "\n";
}

std::string scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["map"] = scenario.map_ref;
  doc["graph"] = scenario.graph_ref;
  doc["agents"] = routes_json(scenario.agent_routes);
  doc["humans"] = routes_json(scenario.human_routes);
  return doc.dump(1) + "\n";
}

VectorMap map_from_json(const std::string& text, Warnings* warnings) {
  const json doc = parse_document(text);
  check_header(doc);
  VectorMap map;
  map.name = get_string(doc, "name");
  const auto& segs = require(doc, "segments", "");
  if (!segs.is_array()) parse_fail("segments", "expected a list");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string field = "segments[" + std::to_string(i) + "]";
    if (!segs[i].is_array() || segs[i].size() != 2) parse_fail(field, "expected [[x,y],[x,y]]");
    Segment s{get_point(segs[i][0], field + "[0]"), get_point(segs[i][1], field + "[1]")};
    if (s.a == s.b) semantic_fail(field + ": degenerate segment (a == b)");
    map.segments.push_back(s);
  }
  if (map.segments.empty() && warnings) {
    warnings->push_back("map '" + map.name + "' has no wall segments");
  }
  return map;
}

NavGraph graph_from_json(const std::string& text, Warnings* /*warnings*/) {
  const json doc = parse_document(text);
  check_header(doc);
  NavGraph graph(get_string(doc, "map"));
  const auto& nodes = require(doc, "nodes", "");
  if (!nodes.is_array()) parse_fail("nodes", "expected a list");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string field = "nodes[" + std::to_string(i) + "]";
    const auto& n = nodes[i];
    if (!n.is_object()) parse_fail(field, "expected an object");
    const auto& id = require(n, "id", field + ".");
    if (!id.is_number_integer()) parse_fail(field + ".id", "expected an integer");
    const Vec2 p = get_point(require(n, "p", field + "."), field + ".p");
    if (graph.has_node(id.get<int>())) semantic_fail(field + ": duplicate node id " + std::to_string(id.get<int>()));
    graph.add_node(id.get<int>(), p);
  }
  const auto& edges = require(doc, "edges", "");
  if (!edges.is_array()) parse_fail("edges", "expected a list");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string field = "edges[" + std::to_string(i) + "]";
    const auto& e = edges[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      parse_fail(field, "expected [id, id]");
    }
    const int a = e[0].get<int>(), b = e[1].get<int>();
    for (int id : {a, b}) {
      if (!graph.has_node(id)) semantic_fail(field + ": edge references unknown node " + std::to_string(id));
    }
    if (a == b) semantic_fail(field + ": self-loop on node " + std::to_string(a));
    graph.add_edge(a, b);
  }
  return graph;
}

Scenario scenario_from_json(const std::string& text, Warnings* /*warnings*/) {
  const json doc = parse_document(text);
  check_header(doc);
  Scenario sc;
  sc.map_ref = get_string(doc, "map");
  sc.graph_ref = get_string(doc, "graph");
  const auto& agents = require(doc, "agents", "");
  if (!agents.is_array()) parse_fail("agents", "expected a list");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    sc.agent_routes.push_back(get_route(agents[i], "agents[" + std::to_string(i) + "]"));
  }
  if (sc.agent_routes.empty()) semantic_fail("agents: a scenario needs at least one agent route");
  if (doc.contains("humans")) {
    const auto& humans = doc["humans"];
    if (!humans.is_array()) parse_fail("humans", "expected a list");
    for (std::size_t i = 0; i < humans.size(); ++i) {
      sc.human_routes.push_back(get_route(humans[i], "humans[" + std::to_string(i) + "]"));
    }
  }
  return sc;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GeometryError(GeometryError::Kind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GeometryError(GeometryError::Kind::Io, "cannot write " + path.string());
  out << text;
}

namespace {
template <typename F>
auto with_path(const std::filesystem::path& path, F&& f) {
  try {
    return f(read_text_file(path));
  } catch (const GeometryError& e) {
    if (e.kind() == GeometryError::Kind::Io) throw;
    throw GeometryError(e.kind(), path.string() + ": " + e.what());
  }
}
}  // namespace

VectorMap load_map(const std::filesystem::path& path, Warnings* w) {
  return with_path(path, [&](const std::string& t) { return map_from_json(t, w); });
}
NavGraph load_graph(const std::filesystem::path& path, Warnings* w) {
  return with_path(path, [&](const std::string& t) { return graph_from_json(t, w); });
}
Scenario load_scenario(const std::filesystem::path& path, Warnings* w) {
  return with_path(path, [&](const std::string& t) { return scenario_from_json(t, w); });
}

void save_map(const std::filesystem::path& path, const VectorMap& map) { write_text_file(path, map_to_json(map)); }
void save_graph(const std::filesystem::path& path, const NavGraph& graph) {
  write_text_file(path, graph_to_json(graph));
}
void save_scenario(const std::filesystem::path& path, const Scenario& scenario) {
  write_text_file(path, scenario_to_json(scenario));
}

GeometryBundle load_bundle(const std::filesystem::path& scenario_path, Warnings* warnings) {
  GeometryBundle b;
  b.scenario = load_scenario(scenario_path, warnings);
  const auto dir = scenario_path.parent_path();
  b.map = load_map(dir / (b.scenario.map_ref + ".map.json"), warnings);
  b.graph = load_graph(dir / (b.scenario.graph_ref + ".graph.json"), warnings);
  return b;
}

std::vector<std::string> check_bundle(const GeometryBundle& b) {
  std::vector<std::string> problems;
  if (b.graph.map_name() != b.map.name) {
    problems.push_back("graph references map '" + b.graph.map_name() + "' but map is '" + b.map.name + "'");
  }
  if (b.scenario.map_ref != b.map.name) {
    problems.push_back("scenario references map '" + b.scenario.map_ref + "' but map is '" + b.map.name + "'");
  }
  for (const auto& [x, y] : validate_graph(b.map, b.graph)) {
    problems.push_back("edge " + std::to_string(x) + "-" + std::to_string(y) + " crosses a wall");
  }
  for (auto& p : validate_scenario(b.scenario, b.graph)) problems.push_back(std::move(p));
  return problems;
}

}  // namespace minisocial
