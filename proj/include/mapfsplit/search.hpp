#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mapfsplit/grid_graph.hpp"
#include "mapfsplit/plan.hpp"

namespace mapfsplit {

using Clock = std::chrono::steady_clock;

/// Forbids robot `robot` from being at `cell` at `time` (vertex), or from
/// moving cell -> to between time-1 and time (edge).
struct Constraint {
  enum class Kind : std::uint8_t { kVertex, kEdge };

  Kind kind = Kind::kVertex;
  std::size_t robot = 0;
  int time = 0;
  Vertex cell;
  Vertex to;  // edge constraints only

  static Constraint vertex(std::size_t robot, Vertex cell, int time) {
    return Constraint{Kind::kVertex, robot, time, cell, {}};
  }
  static Constraint edge(std::size_t robot, Vertex from, Vertex to, int time) {
    return Constraint{Kind::kEdge, robot, time, from, to};
  }

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Conflicts incurred by moving `from` -> `to`, arriving at `time`
/// (from == to for a wait; from is -1 for the start vertex at time 0).
using ConflictCounter = std::function<int(VertexId from, VertexId to, int time)>;

struct SearchResult {
  Path path;
  /// Exact minimum constrained cost is >= lower_bound.
  int lower_bound = 0;
  std::size_t expanded = 0;

  int cost() const noexcept { return static_cast<int>(path.size()) - 1; }
};

/// Plain A* (Manhattan heuristic), ignoring other robots. Ties go to the
/// smaller h, then to the earlier-generated node (E, W, N, S order).
/// Throws NoPathError if `goal` is unreachable.
Path astar_shortest(const GridGraph& g, Vertex start, Vertex goal);

/// Default horizon cap: 2 * width * height.
int default_horizon_cap(const GridGraph& g);

struct SpaceTimeOptions {
  int horizon_cap = 0;        // 0 = default_horizon_cap
  double focal_weight = 1.0;  // w >= 1
  std::optional<Clock::time_point> deadline;
};

/// Space-time focal search for one robot. Waits are allowed everywhere.
///
/// Returns a path obeying every constraint with cost <= w * lower_bound,
/// chosen in the focal set by (fewest conflicts, lower f, earlier
/// insertion). The path ends at `goal` at a time after the last vertex
/// constraint on `goal`, so the robot can rest there.
///
/// Throws NoPathError when the goal is unreachable, HorizonExceededError
/// when no path fits under the cap, TimeoutError past the deadline.
SearchResult constrained_spacetime_search(const GridGraph& g, Vertex start, Vertex goal,
                                          const std::vector<Constraint>& constraints,
                                          const SpaceTimeOptions& options,
                                          const ConflictCounter& conflicts = nullptr);

}  // namespace mapfsplit
