#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mapfsplit/instance.hpp"
#include "mapfsplit/plan.hpp"
#include "mapfsplit/search.hpp"

namespace mapfsplit {

enum class Objective { kMakespan, kSumOfCosts };

const char* to_string(Objective o) noexcept;

struct Budget {
  std::chrono::milliseconds time_limit{60'000};
  /// Conflict-tree nodes; stands in for a memory cap.
  std::size_t node_limit = 100'000;
};

struct SolverOptions {
  Objective objective = Objective::kMakespan;
  /// Suboptimality factor. 1 gives CBS, > 1 gives ECBS.
  double w = 1.0;
  Budget budget;
  /// Absolute deadline shared with an enclosing pipeline; the earlier of
  /// this and now + budget.time_limit wins.
  std::optional<Clock::time_point> deadline;
};

enum class SolveStatus { kSolved, kTimeout, kFailed };

const char* to_string(SolveStatus s) noexcept;

struct SolveStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
  std::size_t low_level_calls = 0;
  std::size_t low_level_expanded = 0;
  double wall_ms = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kFailed;
  Plan plan;
  /// Makespan or sum-of-costs of `plan`; -1 when unsolved.
  int objective = -1;
  /// Best proven lower bound on the optimum.
  int lower_bound = 0;
  SolveStats stats;
  std::string message;

  bool solved() const noexcept { return status == SolveStatus::kSolved; }
};

/// A collision between robots i < j: both at `location` at `time` (vertex),
/// or i moving location -> other while j moves other -> location, arriving
/// at `time` (edge).
struct Conflict {
  enum class Kind { kVertex, kEdge };

  std::size_t i = 0;
  std::size_t j = 0;
  int time = 0;
  Kind kind = Kind::kVertex;
  Vertex location;
  Vertex other;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

/// Earliest conflict, ties broken by (lower i, lower j, vertex before edge).
/// Shorter paths are treated as waiting at their last vertex.
std::optional<Conflict> detect_first_conflict(const std::vector<Path>& paths);

/// CBS (w = 1) or ECBS (w > 1) on the given objective. Deterministic for
/// fixed inputs. Never claims infeasibility: an exhausted budget yields
/// kTimeout with the best lower bound; kFailed is reserved for robots whose
/// goal is unreachable or an exhausted conflict tree.
SolveResult solve(const Instance& inst, const SolverOptions& options);

struct BatchResult {
  std::vector<SolveResult> results;  // input order
  double wall_ms = 0.0;
  std::size_t workers = 1;
};

/// Independent instances solved on up to `workers` threads. Each result is
/// identical to a standalone solve() call.
BatchResult solve_parallel_batch(const std::vector<Instance>& subproblems,
                                 const SolverOptions& options, std::size_t workers);

}  // namespace mapfsplit
