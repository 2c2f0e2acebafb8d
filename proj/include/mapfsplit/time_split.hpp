#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "mapfsplit/ecbs.hpp"
#include "mapfsplit/instance.hpp"
#include "mapfsplit/plan.hpp"

namespace mapfsplit {

enum class CheckMode { kOff, kOracle, kSubsolver };

const char* to_string(CheckMode m) noexcept;

struct TimeSplitSpec {
  int k = 2;
  /// k positive weights summing to 1; empty means uniform.
  std::vector<double> ratios;
  /// kMakespan places boundary j at a fraction of each robot's own
  /// distance; kSumOfCosts caps it by a common time threshold.
  Objective variant = Objective::kMakespan;
  CheckMode check = CheckMode::kOff;
  std::uint64_t seed = 0;
  /// Fresh draws per boundary when a solvability check fails.
  int max_redraws = 10;
  std::chrono::milliseconds subsolver_budget{2000};
};

/// Throws DomainError on k < 2, wrong ratio count, non-positive ratios or a
/// ratio sum away from 1.
void validate_spec(const TimeSplitSpec& spec);

struct IntermediateConfigs {
  /// states[j-1][i]: robot i's state at boundary j, 1 <= j <= k-1.
  std::vector<std::vector<Vertex>> states;
  /// Target distance from the start, per boundary and robot.
  std::vector<std::vector<int>> target;
  /// Window widening rounds used, per boundary and robot.
  std::vector<std::vector<int>> widening;
  /// Total redraws caused by failed solvability checks.
  int redraws = 0;

  int k() const noexcept { return static_cast<int>(states.size()) + 1; }
};

/// Boundary states by distance-annulus intersection around each robot's
/// target offset. Robots are handled in descending shortest-path length;
/// choices within a candidate set are uniform, seeded from spec.seed.
/// Throws SplitError when some robot has no candidate at any window or a
/// solvability check keeps failing.
IntermediateConfigs compute_intermediate_configs(const Instance& inst, const TimeSplitSpec& spec);

/// Same with spec.variant forced to kSumOfCosts: d_ij = min(j*T/k, |P_i|)
/// with T the makespan lower bound.
IntermediateConfigs compute_intermediate_configs_soc(const Instance& inst, TimeSplitSpec spec);

/// k instances on the same graph chaining starts -> boundaries -> goals.
std::vector<Instance> split_instance(const Instance& inst, const IntermediateConfigs& configs);

/// Joins plans end to end, dropping each repeated boundary configuration.
/// Throws ConcatenationError (1-based boundary) on a mismatch.
Plan concatenate(const std::vector<Plan>& plans);

/// kOff: true. kOracle: exact reachability in configuration space, only for
/// n <= 4 and at most 36 vertices (DomainError otherwise). kSubsolver: an
/// ECBS run within `budget`.
bool check_solvable(const Instance& sub, CheckMode mode,
                    std::chrono::milliseconds budget = std::chrono::milliseconds(2000));

}  // namespace mapfsplit
