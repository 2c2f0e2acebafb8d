#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "mapfsplit/instance.hpp"
#include "mapfsplit/plan.hpp"

namespace mapfsplit {

struct Violation {
  enum class Kind {
    kRobotCount,
    kEmptyPath,
    kRaggedHorizon,
    kWrongStart,
    kWrongGoal,
    kNotAVertex,
    kIllegalMove,
    kVertexConflict,
    kEdgeConflict,
  };

  Kind kind;
  std::vector<std::size_t> robots;
  int time = 0;
  std::vector<Vertex> location;
  std::string message;
};

const char* to_string(Violation::Kind k) noexcept;

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Checks robot count, endpoints, move legality (adjacent or wait) and
/// every vertex and swap collision. Lists all violations found.
ValidationReport validate(const Instance& inst, const Plan& plan);

nlohmann::json to_json(const Violation& v);
nlohmann::json to_json(const ValidationReport& r);

struct LowerBounds {
  int makespan = 0;      // max_i dist(s_i, g_i)
  int sum_of_costs = 0;  // sum_i dist(s_i, g_i)
};

/// Throws DomainError if some goal is unreachable.
LowerBounds lower_bounds(const Instance& inst);

/// value / bound, with 0/0 defined as 1.
double optimality_ratio(int value, int bound);

struct Metrics {
  /// t_i: first step from which robot i stays on its goal until T.
  std::vector<int> arrival;
  int makespan = 0;
  int sum_of_costs = 0;
  LowerBounds lower_bound;
  double ratio_makespan = 1.0;
  double ratio_soc = 1.0;
};

/// Throws DomainError if the plan does not validate.
Metrics compute_metrics(const Instance& inst, const Plan& plan);

/// t_i for each robot of a plan whose paths end on their goals.
std::vector<int> arrival_times(const Plan& plan);

}  // namespace mapfsplit
