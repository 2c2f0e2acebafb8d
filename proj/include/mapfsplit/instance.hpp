#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mapfsplit/grid_graph.hpp"

namespace mapfsplit {

struct Robot {
  Vertex start;
  Vertex goal;

  friend bool operator==(const Robot&, const Robot&) = default;
};

/// A (G, starts, goals) triple. Robot order is part of the identity.
///
/// Invariants, checked on construction: every endpoint is a vertex of the
/// graph, starts are pairwise distinct, goals are pairwise distinct.
class Instance {
 public:
  /// Throws ValidationError naming the first offending robot (0-based).
  Instance(std::shared_ptr<const GridGraph> graph, std::vector<Robot> robots);

  const GridGraph& graph() const noexcept { return *graph_; }
  const std::shared_ptr<const GridGraph>& graph_ptr() const noexcept {
    return graph_;
  }
  const std::vector<Robot>& robots() const noexcept { return robots_; }
  std::size_t size() const noexcept { return robots_.size(); }

  std::vector<Vertex> starts() const;
  std::vector<Vertex> goals() const;

  friend bool operator==(const Instance& a, const Instance& b) {
    return *a.graph_ == *b.graph_ && a.robots_ == b.robots_;
  }

 private:
  std::shared_ptr<const GridGraph> graph_;
  std::vector<Robot> robots_;
};

/// One line of a MovingAI `.scen` file (0-based coordinates as in the file).
struct ScenarioEntry {
  int bucket = 0;
  std::string map_name;
  int map_width = 0;
  int map_height = 0;
  int start_x = 0;
  int start_y = 0;
  int goal_x = 0;
  int goal_y = 0;
  double optimal_length = 0.0;
};

struct ScenarioFile {
  std::string map_path;
  std::vector<ScenarioEntry> entries;
};

/// MovingAI `.map` text. `.` and `G` are passable; `@ O T W` are blocked.
GridGraph parse_map(std::string_view text);

/// MovingAI `.scen` version 1 text (entries only, no graph checks).
ScenarioFile parse_scenario_file(std::string_view text);

/// First `agents` entries of a scenario as an instance on `graph`
/// (all entries when nullopt). File row y maps to internal row y+1.
Instance parse_scenario(std::string_view text,
                        std::shared_ptr<const GridGraph> graph,
                        std::optional<std::size_t> agents = std::nullopt);

std::string read_text_file(const std::string& path);

/// Serializes to MovingAI formats; `map_name` is written into each entry.
std::string write_map(const GridGraph& g);
std::string write_scenario(const Instance& inst, const std::string& map_name);

/// Uniform random instance: floor(obstacle_ratio*w*h) obstacles, distinct
/// starts, distinct goals, every goal reachable from its start. Rejection
/// sampling up to `max_attempts` whole instances; throws GenerationError.
Instance generate_random(int width, int height, double obstacle_ratio,
                         std::size_t agents, std::uint64_t seed,
                         int max_attempts = 1000);

/// Random starts/goals on a fixed map (used for benchmark maps without a
/// scenario file).
Instance generate_random_on_map(std::shared_ptr<const GridGraph> graph,
                                std::size_t agents, std::uint64_t seed,
                                int max_attempts = 1000);

/// Native JSON: {width, height, blocked:[[c,r]...], robots:[{start,goal}...]}
/// with 1-based [col,row] pairs.
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

}  // namespace mapfsplit
