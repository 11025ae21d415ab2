#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "minisocial/geometry.hpp"

namespace minisocial {

inline constexpr int kFormatVersion = 1;

class GeometryError : public std::runtime_error {
 public:
  enum class Kind { Parse, Semantic, Io };
  GeometryError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Non-fatal findings collected while loading (e.g. an empty wall list).
using Warnings = std::vector<std::string>;

std::string map_to_json(const VectorMap& map);
std::string graph_to_json(const NavGraph& graph);
std::string scenario_to_json(const Scenario& scenario);

VectorMap map_from_json(const std::string& text, Warnings* warnings = nullptr);
NavGraph graph_from_json(const std::string& text, Warnings* warnings = nullptr);
Scenario scenario_from_json(const std::string& text, Warnings* warnings = nullptr);

VectorMap load_map(const std::filesystem::path& path, Warnings* warnings = nullptr);
NavGraph load_graph(const std::filesystem::path& path, Warnings* warnings = nullptr);
Scenario load_scenario(const std::filesystem::path& path, Warnings* warnings = nullptr);

void save_map(const std::filesystem::path& path, const VectorMap& map);
void save_graph(const std::filesystem::path& path, const NavGraph& graph);
void save_scenario(const std::filesystem::path& path, const Scenario& scenario);

/// A scenario file together with the map and graph it references. The
/// references resolve to `<ref>.map.json` and `<ref>.graph.json` next to the
/// scenario file.
struct GeometryBundle {
  VectorMap map;
  NavGraph graph;
  Scenario scenario;
};

GeometryBundle load_bundle(const std::filesystem::path& scenario_path, Warnings* warnings = nullptr);

/// Full semantic check of a bundle: reference names, graph/wall crossings,
/// route validity. Returns human-readable problems; empty when valid.
std::vector<std::string> check_bundle(const GeometryBundle& bundle);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace minisocial
