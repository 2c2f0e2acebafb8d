#include "mapfsplit/time_split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_set>

#include "mapfsplit/errors.hpp"

namespace mapfsplit {

const char* to_string(CheckMode m) noexcept {
  switch (m) {
    case CheckMode::kOff:
      return "off";
    case CheckMode::kOracle:
      return "oracle";
    case CheckMode::kSubsolver:
      return "subsolver";
  }
  return "unknown";
}

void validate_spec(const TimeSplitSpec& spec) {
  if (spec.k < 2) throw DomainError("time split needs k >= 2");
  if (spec.max_redraws < 0) throw DomainError("max_redraws must be >= 0");
  if (spec.ratios.empty()) return;
  if (spec.ratios.size() != static_cast<std::size_t>(spec.k)) {
    throw DomainError("expected " + std::to_string(spec.k) + " ratios");
  }
  double sum = 0.0;
  for (double r : spec.ratios) {
    if (!(r > 0.0)) throw DomainError("ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw DomainError("ratios must sum to 1");
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t draw_seed(std::uint64_t seed, std::size_t robot, int attempt) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ robot);
  return splitmix(h ^ static_cast<std::uint64_t>(attempt));
}

/// Rounded target offset of robot i at boundary j.
int target_offset(const TimeSplitSpec& spec, int j, int dist, int lb_makespan) {
  const int base = spec.variant == Objective::kMakespan ? dist : lb_makespan;
  long scaled;
  if (spec.ratios.empty()) {
    // Round half up of j*base/k in integers.
    scaled = (2L * j * base + spec.k) / (2L * spec.k);
  } else {
    double prefix = 0.0;
    for (int l = 0; l < j; ++l) prefix += spec.ratios[static_cast<std::size_t>(l)];
    scaled = std::lround(prefix * base);
  }
  return static_cast<int>(std::clamp<long>(scaled, 0, dist));
}

// Configuration-space reachability for tiny instances. Moves are
// reversible, so reachability is symmetric; a simultaneous collision-free
// step splits into single-robot moves into free cells, except a rotation of
// four robots around a 2x2 square, which is added explicitly.
bool reachable_configuration(const Instance& sub) {
  const GridGraph& g = sub.graph();
  const std::size_t n = sub.size();
  if (n == 0) return true;
  auto encode = [&](const std::vector<VertexId>& c) {
    std::uint64_t key = 0;
    for (VertexId v : c) key = (key << 16) | static_cast<std::uint64_t>(v);
    return key;
  };
  std::vector<VertexId> start, goal;
  for (const Robot& r : sub.robots()) {
    start.push_back(g.id(r.start));
    goal.push_back(g.id(r.goal));
  }
  const std::uint64_t goal_key = encode(goal);
  std::vector<std::shared_ptr<const DistanceField>> fields;
  for (VertexId v : goal) fields.push_back(g.distances_from(v));
  auto h = [&](const std::vector<VertexId>& c) {
    int s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int d = fields[i]->raw(c[i]);
      if (d == DistanceField::kUnreachable) return -1;
      s += d;
    }
    return s;
  };
  if (h(start) < 0) return false;

  using Item = std::pair<int, std::vector<VertexId>>;
  auto cmp = [](const Item& a, const Item& b) { return a.first > b.first; };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> frontier(cmp);
  std::unordered_set<std::uint64_t> seen{encode(start)};
  frontier.emplace(h(start), start);
  std::array<VertexId, 4> nb{};
  auto push = [&](const std::vector<VertexId>& c) {
    if (seen.insert(encode(c)).second) frontier.emplace(h(c), c);
  };
  while (!frontier.empty()) {
    const std::vector<VertexId> cur = frontier.top().second;
    frontier.pop();
    if (encode(cur) == goal_key) return true;
    for (std::size_t i = 0; i < n; ++i) {
      const int count = g.neighbor_ids(cur[i], nb);
      for (int k = 0; k < count; ++k) {
        const VertexId v = nb[static_cast<std::size_t>(k)];
        if (std::find(cur.begin(), cur.end(), v) != cur.end()) continue;
        auto next = cur;
        next[i] = v;
        push(next);
      }
    }
    if (n == 4) {
      std::vector<VertexId> sorted = cur;
      std::sort(sorted.begin(), sorted.end());
      const int w = g.width();
      const VertexId a = sorted[0];
      if (a % w != w - 1 && sorted[1] == a + 1 && sorted[2] == a + w && sorted[3] == a + w + 1) {
        const VertexId cycle[4] = {a, a + 1, a + w + 1, a + w};
        for (int step : {1, 3}) {
          auto next = cur;
          for (auto& v : next) {
            const int pos = static_cast<int>(std::find(cycle, cycle + 4, v) - cycle);
            v = cycle[(pos + step) % 4];
          }
          push(next);
        }
      }
    }
  }
  return false;
}

}  // namespace

bool check_solvable(const Instance& sub, CheckMode mode, std::chrono::milliseconds budget) {
  switch (mode) {
    case CheckMode::kOff:
      return true;
    case CheckMode::kOracle:
      if (sub.size() > 4 || sub.graph().vertex_count() > 36) {
        throw DomainError("oracle solvability check needs n <= 4 and at most 36 vertices");
      }
      return reachable_configuration(sub);
    case CheckMode::kSubsolver: {
      SolverOptions opt;
      opt.w = 1.5;
      opt.budget.time_limit = budget;
      return solve(sub, opt).solved();
    }
  }
  return true;
}

IntermediateConfigs compute_intermediate_configs(const Instance& inst, const TimeSplitSpec& spec) {
  validate_spec(spec);
  const GridGraph& g = inst.graph();
  const std::size_t n = inst.size();

  std::vector<int> length(n);
  std::vector<std::shared_ptr<const DistanceField>> from_start(n), from_goal(n);
  int lb_makespan = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Robot& r = inst.robots()[i];
    from_start[i] = g.distances_from(r.start);
    from_goal[i] = g.distances_from(r.goal);
    const int d = from_goal[i]->raw(g.id(r.start));
    if (d == DistanceField::kUnreachable) throw SplitError("robot " + std::to_string(i) + " cannot reach its goal");
    length[i] = d;
    lb_makespan = std::max(lb_makespan, d);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return length[a] > length[b]; });

  const std::vector<VertexId> cells = [&] {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < g.cell_count(); ++v) {
      if (g.is_vertex(v)) out.push_back(v);
    }
    return out;
  }();

  IntermediateConfigs out;
  const auto boundaries = static_cast<std::size_t>(spec.k - 1);
  out.states.assign(boundaries, std::vector<Vertex>(n));
  out.target.assign(boundaries, std::vector<int>(n, 0));
  out.widening.assign(boundaries, std::vector<int>(n, 0));

  std::vector<Vertex> previous = inst.starts();
  for (int j = 1; j <= spec.k - 1; ++j) {
    const auto bj = static_cast<std::size_t>(j - 1);
    bool accepted = false;
    for (int attempt = 0; attempt <= spec.max_redraws && !accepted; ++attempt) {
      std::vector<char> used(static_cast<std::size_t>(g.cell_count()), 0);
      for (std::size_t i : order) {
        const int d = target_offset(spec, j, length[i], lb_makespan);
        out.target[bj][i] = d;
        const auto& ds = from_start[i]->raw_values();
        const auto& dg = from_goal[i]->raw_values();
        const int rest = length[i] - d;
        // Past this window every vertex of the component qualifies.
        int diameter = 0;
        for (VertexId v : cells) diameter = std::max(diameter, ds[static_cast<std::size_t>(v)]);
        const int max_round = diameter + length[i] + 1;
        std::vector<VertexId> candidates;
        // A redraw starts from a wider window so fresh states are possible
        // even where the narrow window has a single vertex.
        int round = std::min(attempt, max_round);
        for (; round <= max_round; ++round) {
          candidates.clear();
          for (VertexId v : cells) {
            const int a = ds[static_cast<std::size_t>(v)];
            const int b = dg[static_cast<std::size_t>(v)];
            if (a < 0 || b < 0 || used[static_cast<std::size_t>(v)]) continue;
            if (std::abs(a - d) <= round && std::abs(b - rest) <= round) candidates.push_back(v);
          }
          if (!candidates.empty()) break;
        }
        if (candidates.empty()) {
          throw SplitError("no free intermediate state for robot " + std::to_string(i) +
                           " at boundary " + std::to_string(j));
        }
        // One uniform quantile per robot, shared by all boundaries, over
        // candidates ordered across the start-goal line: each pick is
        // uniform on its own candidate set while consecutive boundaries
        // stay on the same side.
        const Vertex s = inst.robots()[i].start;
        const Vertex t = inst.robots()[i].goal;
        auto lateral = [&](VertexId id) {
          const Vertex v = g.vertex(id);
          return (v.col - s.col) * (t.row - s.row) - (v.row - s.row) * (t.col - s.col);
        };
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](VertexId a, VertexId b) { return lateral(a) < lateral(b); });
        std::mt19937_64 rng(draw_seed(spec.seed, i, attempt));
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto pick = std::min(candidates.size() - 1,
                                   static_cast<std::size_t>(u * static_cast<double>(candidates.size())));
        const VertexId chosen = candidates[pick];
        used[static_cast<std::size_t>(chosen)] = 1;
        out.states[bj][i] = g.vertex(chosen);
        out.widening[bj][i] = round;
      }
      if (spec.check == CheckMode::kOff) {
        accepted = true;
        break;
      }
      std::vector<Robot> into;
      for (std::size_t i = 0; i < n; ++i) into.push_back({previous[i], out.states[bj][i]});
      accepted = check_solvable(Instance(inst.graph_ptr(), into), spec.check, spec.subsolver_budget);
      if (accepted && j == spec.k - 1) {
        std::vector<Robot> last;
        for (std::size_t i = 0; i < n; ++i) last.push_back({out.states[bj][i], inst.robots()[i].goal});
        accepted = check_solvable(Instance(inst.graph_ptr(), last), spec.check, spec.subsolver_budget);
      }
      if (!accepted) ++out.redraws;
    }
    if (!accepted) {
      throw SplitError("no solvable intermediate configuration at boundary " + std::to_string(j));
    }
    previous = out.states[bj];
  }
  return out;
}

IntermediateConfigs compute_intermediate_configs_soc(const Instance& inst, TimeSplitSpec spec) {
  spec.variant = Objective::kSumOfCosts;
  return compute_intermediate_configs(inst, spec);
}

std::vector<Instance> split_instance(const Instance& inst, const IntermediateConfigs& configs) {
  const std::size_t n = inst.size();
  for (const auto& row : configs.states) {
    if (row.size() != n) throw DomainError("intermediate configuration has the wrong robot count");
  }
  std::vector<Instance> out;
  std::vector<Vertex> from = inst.starts();
  for (std::size_t j = 0; j <= configs.states.size(); ++j) {
    const std::vector<Vertex> to = j < configs.states.size() ? configs.states[j] : inst.goals();
    std::vector<Robot> robots;
    robots.reserve(n);
    for (std::size_t i = 0; i < n; ++i) robots.push_back({from[i], to[i]});
    out.emplace_back(inst.graph_ptr(), std::move(robots));
    from = to;
  }
  return out;
}

Plan concatenate(const std::vector<Plan>& plans) {
  if (plans.empty()) return Plan{};
  Plan out = plans.front();
  for (std::size_t j = 1; j < plans.size(); ++j) {
    const Plan& next = plans[j];
    if (next.paths.size() != out.paths.size()) {
      throw ConcatenationError(j, 0, "robot count differs across the boundary");
    }
    for (std::size_t i = 0; i < out.paths.size(); ++i) {
      if (out.paths[i].empty() || next.paths[i].empty() ||
          out.paths[i].back() != next.paths[i].front()) {
        throw ConcatenationError(j, i, "end of part does not match start of the next");
      }
    }
    for (std::size_t i = 0; i < out.paths.size(); ++i) {
      out.paths[i].insert(out.paths[i].end(), next.paths[i].begin() + 1, next.paths[i].end());
    }
  }
  return Plan::from_paths(std::move(out.paths));
}

}  // namespace mapfsplit
