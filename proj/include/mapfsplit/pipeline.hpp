#pragma once

#include <string>
#include <vector>

#include "mapfsplit/ecbs.hpp"
#include "mapfsplit/space_split.hpp"
#include "mapfsplit/time_split.hpp"

namespace mapfsplit {

enum class SplitKind { kNone, kTime, kSpace, kTimeSpace };

const char* to_string(SplitKind s) noexcept;

struct SpaceSpec {
  int l = 2;
  int m = 1;
  BufferDims buffer;
  double lambda1 = 1.0;
  double lambda2 = 2.0;
  /// 0 picks the smallest feasible count.
  int phases = 0;
};

struct PipelineOptions {
  /// Objective, w and the budget of the whole run. The time limit covers
  /// splitting and every sub-solve; the node limit applies per sub-solve.
  SolverOptions solver;
  SplitKind split = SplitKind::kNone;
  TimeSplitSpec time;
  SpaceSpec space;
  std::size_t workers = 1;
  /// Redraw once, then solve unsplit when a split run fails before the
  /// deadline.
  bool fallback = true;
  AllocationObserver observer;
};

/// none, 4t, 2x1s, 2x1s2t.
std::string strategy_label(const PipelineOptions& options);

struct PipelineStats {
  std::string strategy;  // what actually produced the plan
  /// Sequential rounds: k for time, phases for space, phases*k for both.
  int phases = 1;
  std::size_t subproblems = 1;
  std::size_t workers = 1;
  double split_ms = 0.0;
  double subsolve_ms = 0.0;
  double wall_ms = 0.0;
  int redraws = 0;
  std::vector<std::string> fallbacks;
  std::size_t expanded = 0;
};

struct PipelineResult {
  SolveStatus status = SolveStatus::kFailed;
  Plan plan;
  PipelineStats stats;
  std::string message;

  bool solved() const noexcept { return status == SolveStatus::kSolved; }
};

/// Solves `inst` with the configured split. Solved plans have passed the
/// validator. kTimeout means the deadline passed; kFailed covers split and
/// solver failures after every fallback.
PipelineResult run_pipeline(const Instance& inst, const PipelineOptions& options);

/// Per-phase, per-region sub-solve of a space split. `time_k` >= 2 further
/// time-splits every region task. Throws SplitError when a sub-solve fails,
/// TimeoutError past the deadline.
Plan solve_phase_plan(const Instance& inst, const PhasePlan& plan, const SolverOptions& sub,
                      std::size_t workers, const TimeSplitSpec* time, PipelineStats* stats);

}  // namespace mapfsplit

namespace mapfsplit {

/// Reads a label of the strategy_label form into `options` (split kind,
/// time.k, space.l, space.m). Throws DomainError on anything else.
void apply_strategy_label(const std::string& label, PipelineOptions& options);

}  // namespace mapfsplit
