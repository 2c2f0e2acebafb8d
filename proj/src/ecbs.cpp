#include "mapfsplit/ecbs.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

#include "mapfsplit/errors.hpp"
#include "mapfsplit/parallel.hpp"
#include "spacetime_search.hpp"

namespace mapfsplit {

const char* to_string(Objective o) noexcept {
  return o == Objective::kMakespan ? "makespan" : "soc";
}

const char* to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::kSolved:
      return "solved";
    case SolveStatus::kTimeout:
      return "timeout";
    case SolveStatus::kFailed:
      return "failed";
  }
  return "unknown";
}

namespace {

using IdPath = std::vector<VertexId>;
using PathPtr = std::shared_ptr<const IdPath>;

inline VertexId position(const IdPath& p, int t) {
  return t < static_cast<int>(p.size()) ? p[static_cast<std::size_t>(t)] : p.back();
}

struct IdConstraint {
  Constraint::Kind kind;
  std::size_t robot;
  int time;
  VertexId a;
  VertexId b;
};

struct IdConflict {
  std::size_t i;
  std::size_t j;
  int time;
  Conflict::Kind kind;
  VertexId a;  // vertex, or i's origin for an edge conflict
  VertexId b;  // i's destination for an edge conflict
};

/// Per-solve scratch for conflict scans over a grid of `cells` cells.
class ConflictScanner {
 public:
  explicit ConflictScanner(int cells)
      : stamp_(static_cast<std::size_t>(cells), -1),
        first_(static_cast<std::size_t>(cells), -1),
        count_(static_cast<std::size_t>(cells), 0) {}

  /// Counts colliding (pair, time) events; with `stop_at_first` returns as
  /// soon as the earliest conflict is known.
  int scan(const std::vector<const IdPath*>& paths, bool stop_at_first,
           std::optional<IdConflict>* first) {
    int horizon = 0;
    for (const IdPath* p : paths) horizon = std::max(horizon, static_cast<int>(p->size()) - 1);
    int total = 0;
    for (int t = 0; t <= horizon; ++t) {
      const long long mark = ++epoch_;
      std::optional<IdConflict> best;
      auto offer = [&](const IdConflict& c) {
        if (!best || std::tie(c.i, c.j, c.kind) < std::tie(best->i, best->j, best->kind)) {
          best = c;
        }
      };
      for (std::size_t i = 0; i < paths.size(); ++i) {
        const VertexId v = position(*paths[i], t);
        auto& st = stamp_[static_cast<std::size_t>(v)];
        if (st != mark) {
          st = mark;
          first_[static_cast<std::size_t>(v)] = static_cast<int>(i);
          count_[static_cast<std::size_t>(v)] = 1;
        } else {
          total += count_[static_cast<std::size_t>(v)]++;
          if (first) {
            offer(IdConflict{static_cast<std::size_t>(first_[static_cast<std::size_t>(v)]), i,
                             t, Conflict::Kind::kVertex, v, v});
          }
        }
      }
      if (t > 0) {
        moves_.clear();
        for (std::size_t i = 0; i < paths.size(); ++i) {
          const VertexId from = position(*paths[i], t - 1);
          const VertexId to = position(*paths[i], t);
          if (from == to) continue;
          if (auto it = moves_.find(move_key(to, from)); it != moves_.end()) {
            total += it->second.second;
            if (first) {
              offer(IdConflict{static_cast<std::size_t>(it->second.first), i, t,
                               Conflict::Kind::kEdge, to, from});
            }
          }
          auto [it, fresh] = moves_.try_emplace(move_key(from, to), static_cast<int>(i), 0);
          ++it->second.second;
        }
      }
      if (first && best && !*first) {
        *first = best;
        if (stop_at_first) return total;
      }
    }
    return total;
  }

 private:
  std::vector<long long> stamp_;
  std::vector<int> first_;
  std::vector<int> count_;
  std::unordered_map<std::uint64_t, std::pair<int, int>> moves_;  // -> (first robot, count)
  long long epoch_ = 0;

  static std::uint64_t move_key(VertexId a, VertexId b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }
};

/// Other robots' occupancy, used to count conflicts in the low level.
class Reservations {
 public:
  void add(const IdPath& p) {
    const int end = static_cast<int>(p.size()) - 1;
    for (int t = 0; t < end; ++t) ++occ_[detail::vertex_time_key(p[static_cast<std::size_t>(t)], t)];
    for (int t = 1; t <= end; ++t) {
      const VertexId a = p[static_cast<std::size_t>(t - 1)];
      const VertexId b = p[static_cast<std::size_t>(t)];
      if (a != b) ++moves_[detail::edge_time_key(a, b, t)];
    }
    rest_.emplace(p.back(), end);
    auto it = rest_.find(p.back());
    if (it->second > end) it->second = end;
  }

  /// Conflicts for a robot moving from -> to arriving at t, excluding the
  /// robot's own previous path `self` (may be null).
  int count(VertexId from, VertexId to, int t, const IdPath* self) const {
    int c = 0;
    if (auto it = occ_.find(detail::vertex_time_key(to, t)); it != occ_.end()) c += it->second;
    if (auto it = rest_.find(to); it != rest_.end() && it->second <= t) ++c;
    if (self && position(*self, t) == to) --c;
    if (from >= 0 && from != to) {
      if (auto it = moves_.find(detail::edge_time_key(to, from, t)); it != moves_.end()) {
        c += it->second;
        if (self && t < static_cast<int>(self->size()) && position(*self, t - 1) == to &&
            position(*self, t) == from) {
          --c;
        }
      }
    }
    return c;
  }

 private:
  std::unordered_map<std::uint64_t, int> occ_;
  std::unordered_map<std::uint64_t, int> moves_;
  std::unordered_map<VertexId, int> rest_;
};

struct Node {
  int parent = -1;
  std::optional<IdConstraint> added;
  std::vector<PathPtr> paths;
  std::vector<int> agent_lb;
  int cost = 0;
  int lb = 0;
  int conflicts = 0;
};

class Solver {
 public:
  Solver(const Instance& inst, const SolverOptions& options)
      : inst_(inst),
        g_(inst.graph()),
        options_(options),
        scanner_(inst.graph().cell_count()) {
    start_time_ = Clock::now();
    deadline_ = start_time_ + options.budget.time_limit;
    if (options.deadline && *options.deadline < deadline_) deadline_ = *options.deadline;
    for (const Robot& r : inst.robots()) {
      starts_.push_back(g_.id_unchecked(r.start));
      goals_.push_back(g_.id_unchecked(r.goal));
    }
  }

  SolveResult run() {
    SolveResult result;
    try {
      result = search();
    } catch (const TimeoutError& e) {
      result.status = SolveStatus::kTimeout;
      result.lower_bound = best_lb_;
      result.message = e.what();
    } catch (const HorizonExceededError& e) {
      result.status = SolveStatus::kFailed;
      result.message = e.what();
    } catch (const NoPathError& e) {
      result.status = SolveStatus::kFailed;
      result.message = e.what();
    }
    result.stats = stats_;
    result.stats.wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start_time_).count();
    return result;
  }

 private:
  int objective_of(const std::vector<int>& values) const {
    if (values.empty()) return 0;
    if (options_.objective == Objective::kMakespan) {
      return *std::max_element(values.begin(), values.end());
    }
    return std::accumulate(values.begin(), values.end(), 0);
  }

  int cost_of(const std::vector<PathPtr>& paths) const {
    std::vector<int> lengths;
    lengths.reserve(paths.size());
    for (const auto& p : paths) lengths.push_back(static_cast<int>(p->size()) - 1);
    return objective_of(lengths);
  }

  int count_conflicts(const std::vector<PathPtr>& paths) {
    std::vector<const IdPath*> raw;
    raw.reserve(paths.size());
    for (const auto& p : paths) raw.push_back(p.get());
    return scanner_.scan(raw, false, nullptr);
  }

  std::optional<IdConflict> first_conflict(const std::vector<PathPtr>& paths) {
    std::vector<const IdPath*> raw;
    raw.reserve(paths.size());
    for (const auto& p : paths) raw.push_back(p.get());
    std::optional<IdConflict> first;
    scanner_.scan(raw, true, &first);
    return first;
  }

  std::vector<IdConstraint> constraints_for(int node_index, std::size_t robot) const {
    std::vector<IdConstraint> out;
    for (int i = node_index; i >= 0; i = nodes_[static_cast<std::size_t>(i)]->parent) {
      const auto& added = nodes_[static_cast<std::size_t>(i)]->added;
      if (added && added->robot == robot) out.push_back(*added);
    }
    return out;
  }

  /// nullopt when no path exists within the horizon.
  template <class Counter>
  std::optional<detail::SpaceTimeIdResult> plan_robot(std::size_t robot,
                                                      const std::vector<IdConstraint>& cons,
                                                      Counter&& counter) {
    detail::ConstraintTable table;
    for (const IdConstraint& c : cons) {
      if (c.kind == Constraint::Kind::kVertex) {
        table.add_vertex(c.a, c.time, goals_[robot]);
      } else {
        table.add_edge(c.a, c.b, c.time);
      }
    }
    const int cap = std::max(default_horizon_cap(g_), table.max_time + g_.cell_count());
    ++stats_.low_level_calls;
    try {
      auto r = detail::spacetime_search(g_, starts_[robot], goals_[robot], table, cap,
                                        options_.w, deadline_, counter);
      stats_.low_level_expanded += r.expanded;
      return r;
    } catch (const HorizonExceededError&) {
      return std::nullopt;
    }
  }

  int focal_bound(int lb) const {
    return static_cast<int>(std::floor(options_.w * static_cast<double>(lb) + 1e-9));
  }

  void insert(int idx) {
    const Node& n = *nodes_[static_cast<std::size_t>(idx)];
    open_.emplace(n.lb, idx);
    if (n.cost <= focal_bound(current_lb_)) focal_.emplace(n.conflicts, n.cost, idx);
  }

  SolveResult search() {
    const std::size_t n = inst_.size();
    auto root = std::make_unique<Node>();
    root->paths.resize(n);
    root->agent_lb.resize(n);
    Reservations planned;
    for (std::size_t r = 0; r < n; ++r) {
      auto counter = [&planned](VertexId from, VertexId to, int t) {
        return planned.count(from, to, t, nullptr);
      };
      auto res = plan_robot(r, {}, counter);
      if (!res) throw HorizonExceededError("robot " + std::to_string(r) + " has no path");
      root->agent_lb[r] = res->lower_bound;
      auto path = std::make_shared<const IdPath>(std::move(res->path));
      planned.add(*path);
      root->paths[r] = std::move(path);
    }
    finish_node(*root);
    nodes_.push_back(std::move(root));
    stats_.generated = 1;
    current_lb_ = nodes_[0]->lb;
    best_lb_ = current_lb_;
    insert(0);

    while (!open_.empty()) {
      if (Clock::now() > deadline_) throw TimeoutError("solver deadline");
      if (nodes_.size() > options_.budget.node_limit) throw TimeoutError("node limit");

      const int lb_min = open_.begin()->first;
      if (lb_min > current_lb_) {
        const int old_bound = focal_bound(current_lb_);
        current_lb_ = lb_min;
        const int bound = focal_bound(current_lb_);
        for (const auto& [lb, idx] : open_) {
          if (lb > bound) break;
          const Node& node = *nodes_[static_cast<std::size_t>(idx)];
          if (node.cost > old_bound && node.cost <= bound) {
            focal_.emplace(node.conflicts, node.cost, idx);
          }
        }
      }
      best_lb_ = std::max(best_lb_, current_lb_);

      const auto [conflicts, cost, idx] = *focal_.begin();
      focal_.erase(focal_.begin());
      open_.erase({nodes_[static_cast<std::size_t>(idx)]->lb, idx});
      ++stats_.expanded;
      Node& node = *nodes_[static_cast<std::size_t>(idx)];

      const auto conflict = first_conflict(node.paths);
      if (!conflict) return finish(node);

      Reservations table;
      for (const auto& p : node.paths) table.add(*p);
      for (const std::size_t robot : {conflict->i, conflict->j}) {
        IdConstraint c{};
        c.robot = robot;
        c.time = conflict->time;
        if (conflict->kind == Conflict::Kind::kVertex) {
          c.kind = Constraint::Kind::kVertex;
          c.a = c.b = conflict->a;
        } else {
          c.kind = Constraint::Kind::kEdge;
          c.a = robot == conflict->i ? conflict->a : conflict->b;
          c.b = robot == conflict->i ? conflict->b : conflict->a;
        }
        auto child = std::make_unique<Node>();
        child->parent = idx;
        child->added = c;
        auto cons = constraints_for(idx, robot);
        cons.push_back(c);
        const IdPath* self = node.paths[robot].get();
        auto counter = [&table, self](VertexId from, VertexId to, int t) {
          return table.count(from, to, t, self);
        };
        auto res = plan_robot(robot, cons, counter);
        if (!res) continue;
        child->paths = node.paths;
        child->agent_lb = node.agent_lb;
        child->agent_lb[robot] = std::max(node.agent_lb[robot], res->lower_bound);
        child->paths[robot] = std::make_shared<const IdPath>(std::move(res->path));
        finish_node(*child);
        nodes_.push_back(std::move(child));
        ++stats_.generated;
        insert(static_cast<int>(nodes_.size()) - 1);
      }
      // Expanded nodes only keep their constraint for the chain.
      node.paths.clear();
      node.paths.shrink_to_fit();
      node.agent_lb.clear();
      node.agent_lb.shrink_to_fit();
    }
    SolveResult out;
    out.status = SolveStatus::kFailed;
    out.lower_bound = best_lb_;
    out.message = "conflict tree exhausted within the horizon cap";
    return out;
  }

  void finish_node(Node& node) {
    node.cost = cost_of(node.paths);
    node.lb = std::max(objective_of(node.agent_lb), 0);
    node.conflicts = count_conflicts(node.paths);
  }

  SolveResult finish(const Node& node) {
    SolveResult out;
    out.status = SolveStatus::kSolved;
    std::vector<Path> paths;
    paths.reserve(node.paths.size());
    for (const auto& p : node.paths) {
      Path path;
      path.reserve(p->size());
      for (VertexId v : *p) path.push_back(g_.vertex(v));
      paths.push_back(std::move(path));
    }
    out.plan = paths.empty() ? Plan{} : Plan::from_paths(std::move(paths));
    out.objective = node.cost;
    out.lower_bound = std::min(best_lb_, node.cost);
    return out;
  }

  const Instance& inst_;
  const GridGraph& g_;
  SolverOptions options_;
  ConflictScanner scanner_;
  Clock::time_point start_time_;
  Clock::time_point deadline_;
  std::vector<VertexId> starts_;
  std::vector<VertexId> goals_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::set<std::pair<int, int>> open_;             // (lb, idx)
  std::set<std::tuple<int, int, int>> focal_;      // (conflicts, cost, idx)
  int current_lb_ = 0;
  int best_lb_ = 0;
  SolveStats stats_;
};

}  // namespace

std::optional<Conflict> detect_first_conflict(const std::vector<Path>& paths) {
  if (paths.empty()) return std::nullopt;
  int max_col = 1;
  int max_row = 1;
  for (const Path& p : paths) {
    if (p.empty()) throw DomainError("detect_first_conflict: empty path");
    for (const Vertex& v : p) {
      if (v.col < 1 || v.row < 1) throw DomainError("detect_first_conflict: bad vertex");
      max_col = std::max(max_col, v.col);
      max_row = std::max(max_row, v.row);
    }
  }
  const GridGraph frame = GridGraph::empty(max_col, max_row);
  std::vector<IdPath> ids;
  ids.reserve(paths.size());
  for (const Path& p : paths) {
    IdPath ip;
    ip.reserve(p.size());
    for (const Vertex& v : p) ip.push_back(frame.id_unchecked(v));
    ids.push_back(std::move(ip));
  }
  std::vector<const IdPath*> raw;
  for (const auto& p : ids) raw.push_back(&p);
  ConflictScanner scanner(frame.cell_count());
  std::optional<IdConflict> first;
  scanner.scan(raw, true, &first);
  if (!first) return std::nullopt;
  return Conflict{first->i, first->j, first->time, first->kind, frame.vertex(first->a),
                  frame.vertex(first->b)};
}

SolveResult solve(const Instance& inst, const SolverOptions& options) {
  if (options.w < 1.0) throw DomainError("suboptimality factor w must be >= 1");
  return Solver(inst, options).run();
}

BatchResult solve_parallel_batch(const std::vector<Instance>& subproblems,
                                 const SolverOptions& options, std::size_t workers) {
  BatchResult out;
  out.workers = std::max<std::size_t>(1, workers);
  out.results.resize(subproblems.size());
  const auto start = Clock::now();
  parallel_for(subproblems.size(), out.workers,
               [&](std::size_t i) { out.results[i] = solve(subproblems[i], options); });
  out.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return out;
}

}  // namespace mapfsplit
