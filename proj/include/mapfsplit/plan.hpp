#pragma once

#include <vector>

#include "json.hpp"

#include "mapfsplit/grid_graph.hpp"

namespace mapfsplit {

/// p^0 ... p^T for one robot; consecutive entries are equal (wait) or
/// adjacent.
using Path = std::vector<Vertex>;

/// One path per robot, all padded to the same horizon T.
struct Plan {
  std::vector<Path> paths;

  /// Pads every path with waits at its last vertex to the longest length.
  static Plan from_paths(std::vector<Path> paths);

  /// T; -1 for a plan without robots or with empty paths.
  int horizon() const noexcept {
    return paths.empty() || paths.front().empty()
               ? -1
               : static_cast<int>(paths.front().size()) - 1;
  }
  std::size_t robot_count() const noexcept { return paths.size(); }

  /// Configuration at time t (clamped to the last step).
  std::vector<Vertex> configuration(int t) const;

  friend bool operator==(const Plan&, const Plan&) = default;
};

/// {horizon: T, paths: [[[c,r],...],...]} with 1-based coordinates.
nlohmann::json plan_to_json(const Plan& plan);
/// Throws ParseError on malformed input. Paths are taken as given (no
/// padding), so ragged input is reported later by the validator.
Plan plan_from_json(const nlohmann::json& j);

}  // namespace mapfsplit
