#include "mapfsplit/validation.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include "mapfsplit/errors.hpp"

namespace mapfsplit {

const char* to_string(Violation::Kind k) noexcept {
  switch (k) {
    case Violation::Kind::kRobotCount:
      return "robot_count";
    case Violation::Kind::kEmptyPath:
      return "empty_path";
    case Violation::Kind::kRaggedHorizon:
      return "ragged_horizon";
    case Violation::Kind::kWrongStart:
      return "wrong_start";
    case Violation::Kind::kWrongGoal:
      return "wrong_goal";
    case Violation::Kind::kNotAVertex:
      return "not_a_vertex";
    case Violation::Kind::kIllegalMove:
      return "illegal_move";
    case Violation::Kind::kVertexConflict:
      return "vertex_conflict";
    case Violation::Kind::kEdgeConflict:
      return "edge_conflict";
  }
  return "unknown";
}

namespace {

std::string show(Vertex v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate(const Instance& inst, const Plan& plan) {
  ValidationReport out;
  auto add = [&](Violation::Kind kind, std::vector<std::size_t> robots, int time,
                 std::vector<Vertex> loc, std::string msg) {
    out.violations.push_back(Violation{kind, std::move(robots), time, std::move(loc), std::move(msg)});
  };
  const GridGraph& g = inst.graph();

  if (plan.paths.size() != inst.size()) {
    add(Violation::Kind::kRobotCount, {}, 0, {},
        "plan has " + std::to_string(plan.paths.size()) + " paths for " +
            std::to_string(inst.size()) + " robots");
    return out;
  }
  std::size_t horizon = 0;
  for (std::size_t i = 0; i < plan.paths.size(); ++i) {
    if (plan.paths[i].empty()) {
      add(Violation::Kind::kEmptyPath, {i}, 0, {}, "empty path");
      return out;
    }
    horizon = std::max(horizon, plan.paths[i].size());
  }
  for (std::size_t i = 0; i < plan.paths.size(); ++i) {
    if (plan.paths[i].size() != horizon) {
      add(Violation::Kind::kRaggedHorizon, {i}, static_cast<int>(plan.paths[i].size()) - 1, {},
          "path length differs from the plan horizon");
    }
  }
  // Shorter paths are read as waiting on their last vertex from here on.
  auto at = [&](std::size_t i, std::size_t t) {
    const Path& p = plan.paths[i];
    return t < p.size() ? p[t] : p.back();
  };

  for (std::size_t i = 0; i < plan.paths.size(); ++i) {
    const Path& p = plan.paths[i];
    const Robot& r = inst.robots()[i];
    if (p.front() != r.start) {
      add(Violation::Kind::kWrongStart, {i}, 0, {p.front()}, "starts at " + show(p.front()) + ", expected " + show(r.start));
    }
    if (p.back() != r.goal) {
      add(Violation::Kind::kWrongGoal, {i}, static_cast<int>(p.size()) - 1, {p.back()},
          "ends at " + show(p.back()) + ", expected " + show(r.goal));
    }
    for (std::size_t t = 0; t < p.size(); ++t) {
      if (!g.is_vertex(p[t])) {
        add(Violation::Kind::kNotAVertex, {i}, static_cast<int>(t), {p[t]}, show(p[t]) + " is not a free cell");
      }
      if (t > 0) {
        const int d = std::abs(p[t].col - p[t - 1].col) + std::abs(p[t].row - p[t - 1].row);
        if (d > 1) {
          add(Violation::Kind::kIllegalMove, {i}, static_cast<int>(t), {p[t - 1], p[t]},
              "jump " + show(p[t - 1]) + " -> " + show(p[t]));
        }
      }
    }
  }

  for (std::size_t t = 0; t < horizon; ++t) {
    std::map<Vertex, std::vector<std::size_t>> occupants;
    for (std::size_t i = 0; i < plan.paths.size(); ++i) occupants[at(i, t)].push_back(i);
    for (const auto& [v, who] : occupants) {
      for (std::size_t a = 0; a < who.size(); ++a) {
        for (std::size_t b = a + 1; b < who.size(); ++b) {
          add(Violation::Kind::kVertexConflict, {who[a], who[b]}, static_cast<int>(t), {v},
              "robots " + std::to_string(who[a]) + " and " + std::to_string(who[b]) + " share " + show(v));
        }
      }
    }
    if (t == 0) continue;
    std::map<std::pair<Vertex, Vertex>, std::vector<std::size_t>> traversals;
    for (std::size_t i = 0; i < plan.paths.size(); ++i) {
      const Vertex a = at(i, t - 1);
      const Vertex b = at(i, t);
      if (a != b) traversals[{a, b}].push_back(i);
    }
    for (const auto& [edge, who] : traversals) {
      if (!(edge.first < edge.second)) continue;
      auto rev = traversals.find({edge.second, edge.first});
      if (rev == traversals.end()) continue;
      for (std::size_t i : who) {
        for (std::size_t j : rev->second) {
          add(Violation::Kind::kEdgeConflict, {std::min(i, j), std::max(i, j)}, static_cast<int>(t),
              {edge.first, edge.second},
              "robots " + std::to_string(i) + " and " + std::to_string(j) + " swap across " +
                  show(edge.first) + "-" + show(edge.second));
        }
      }
    }
  }
  return out;
}

nlohmann::json to_json(const Violation& v) {
  nlohmann::json loc = nlohmann::json::array();
  for (const Vertex& x : v.location) loc.push_back({x.col, x.row});
  return {{"kind", to_string(v.kind)},
          {"robots", v.robots},
          {"time", v.time},
          {"location", loc},
          {"message", v.message}};
}

nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json list = nlohmann::json::array();
  for (const Violation& v : r.violations) list.push_back(to_json(v));
  return {{"ok", r.ok()}, {"violations", list}};
}

LowerBounds lower_bounds(const Instance& inst) {
  LowerBounds lb;
  for (const Robot& r : inst.robots()) {
    const auto d = inst.graph().distance(r.start, r.goal);
    if (!d) throw DomainError("goal unreachable; no lower bound");
    lb.makespan = std::max(lb.makespan, *d);
    lb.sum_of_costs += *d;
  }
  return lb;
}

double optimality_ratio(int value, int bound) {
  if (bound == 0) return value == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(value) / static_cast<double>(bound);
}

std::vector<int> arrival_times(const Plan& plan) {
  std::vector<int> out;
  out.reserve(plan.paths.size());
  for (const Path& p : plan.paths) {
    int t = static_cast<int>(p.size()) - 1;
    while (t > 0 && p[static_cast<std::size_t>(t - 1)] == p.back()) --t;
    out.push_back(std::max(t, 0));
  }
  return out;
}

Metrics compute_metrics(const Instance& inst, const Plan& plan) {
  const auto report = validate(inst, plan);
  if (!report.ok()) {
    throw DomainError("cannot compute metrics of an invalid plan: " + report.violations.front().message);
  }
  Metrics m;
  m.arrival = arrival_times(plan);
  for (int t : m.arrival) {
    m.makespan = std::max(m.makespan, t);
    m.sum_of_costs += t;
  }
  m.lower_bound = lower_bounds(inst);
  m.ratio_makespan = optimality_ratio(m.makespan, m.lower_bound.makespan);
  m.ratio_soc = optimality_ratio(m.sum_of_costs, m.lower_bound.sum_of_costs);
  return m;
}

}  // namespace mapfsplit
