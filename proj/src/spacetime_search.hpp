#pragma once

// Id-based space-time focal search shared by the public single-agent API and
// the ECBS low level. Not installed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mapfsplit/errors.hpp"
#include "mapfsplit/grid_graph.hpp"
#include "mapfsplit/search.hpp"

namespace mapfsplit::detail {

inline std::uint64_t vertex_time_key(VertexId v, int t) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t)) << 32) |
         static_cast<std::uint32_t>(v);
}

inline std::uint64_t edge_time_key(VertexId a, VertexId b, int t) {
  // 22 bits per cell id, 20 bits of time.
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t)) << 44) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 22) |
         static_cast<std::uint32_t>(b);
}

/// Constraints of one robot, indexed for O(1) lookup.
struct ConstraintTable {
  std::unordered_set<std::uint64_t> vertex;
  std::unordered_set<std::uint64_t> edge;
  int max_time = -1;
  int goal_last = -1;  // latest vertex constraint on the goal

  void add_vertex(VertexId v, int t, VertexId goal) {
    vertex.insert(vertex_time_key(v, t));
    max_time = std::max(max_time, t);
    if (v == goal) goal_last = std::max(goal_last, t);
  }
  void add_edge(VertexId a, VertexId b, int t) {
    edge.insert(edge_time_key(a, b, t));
    max_time = std::max(max_time, t);
  }
  bool vertex_blocked(VertexId v, int t) const {
    return !vertex.empty() && vertex.count(vertex_time_key(v, t)) != 0;
  }
  bool edge_blocked(VertexId a, VertexId b, int t) const {
    return !edge.empty() && edge.count(edge_time_key(a, b, t)) != 0;
  }
};

struct NoConflicts {
  int operator()(VertexId, VertexId, int) const { return 0; }
};

struct SpaceTimeIdResult {
  std::vector<VertexId> path;
  int lower_bound = 0;
  std::size_t expanded = 0;
};

/// Counter: int(VertexId from, VertexId to, int time).
template <class Counter>
SpaceTimeIdResult spacetime_search(const GridGraph& g, VertexId start, VertexId goal,
                                   const ConstraintTable& ct, int horizon_cap, double w,
                                   const std::optional<Clock::time_point>& deadline,
                                   Counter&& counter) {
  const auto field = g.distances_from(goal);
  if (!field->reachable(start)) throw NoPathError("goal unreachable from start");

  struct Node {
    VertexId v;
    int t;
    int f;
    int conflicts;
    int parent;
  };
  struct FocalKey {
    int conflicts;
    int f;
    int idx;
    bool operator<(const FocalKey& o) const {
      if (conflicts != o.conflicts) return conflicts < o.conflicts;
      if (f != o.f) return f < o.f;
      return idx < o.idx;
    }
  };
  struct Seen {
    int best_conflicts;
    bool closed;
  };

  std::vector<Node> nodes;
  std::set<std::pair<int, int>> open;  // (f, idx)
  std::set<FocalKey> focal;
  std::unordered_map<std::uint64_t, Seen> seen;
  nodes.reserve(1024);

  auto heuristic = [&](VertexId v, int t) {
    return std::max(field->raw(v), ct.goal_last + 1 - t);
  };

  int focal_bound = 0;
  auto bound_for = [w](int fmin) {
    return static_cast<int>(std::floor(w * static_cast<double>(fmin) + 1e-9));
  };

  auto push = [&](VertexId v, int t, int conflicts, int parent) {
    const int f = t + heuristic(v, t);
    if (f > horizon_cap) return;
    const std::uint64_t key = vertex_time_key(v, t);
    auto [it, fresh] = seen.try_emplace(key, Seen{conflicts, false});
    if (!fresh) {
      if (it->second.closed || it->second.best_conflicts <= conflicts) return;
      it->second.best_conflicts = conflicts;
    }
    const int idx = static_cast<int>(nodes.size());
    nodes.push_back(Node{v, t, f, conflicts, parent});
    open.emplace(f, idx);
    if (f <= focal_bound) focal.insert(FocalKey{conflicts, f, idx});
  };

  if (ct.vertex_blocked(start, 0)) {
    throw HorizonExceededError("start vertex constrained at time 0");
  }
  push(start, 0, counter(-1, start, 0), -1);
  if (open.empty()) throw HorizonExceededError("no path within horizon cap");
  int fmin = open.begin()->first;
  focal_bound = bound_for(fmin);
  for (const auto& [f, idx] : open) {
    if (f > focal_bound) break;
    focal.insert(FocalKey{nodes[static_cast<std::size_t>(idx)].conflicts, f, idx});
  }

  std::size_t expanded = 0;
  std::array<VertexId, 4> nbrs{};
  while (!open.empty()) {
    const int new_fmin = open.begin()->first;
    if (new_fmin > fmin) {
      const int old_bound = focal_bound;
      fmin = new_fmin;
      focal_bound = bound_for(fmin);
      for (auto it = open.upper_bound({old_bound, INT32_MAX}); it != open.end(); ++it) {
        if (it->first > focal_bound) break;
        focal.insert(FocalKey{nodes[static_cast<std::size_t>(it->second)].conflicts,
                              it->first, it->second});
      }
    }
    const FocalKey top = *focal.begin();
    focal.erase(focal.begin());
    open.erase({top.f, top.idx});
    const Node node = nodes[static_cast<std::size_t>(top.idx)];
    Seen& state = seen[vertex_time_key(node.v, node.t)];
    if (state.closed) continue;
    state.closed = true;

    if (node.v == goal && node.t > ct.goal_last) {
      SpaceTimeIdResult out;
      out.lower_bound = fmin;
      out.expanded = expanded;
      out.path.resize(static_cast<std::size_t>(node.t) + 1);
      for (int i = top.idx; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent) {
        out.path[static_cast<std::size_t>(nodes[static_cast<std::size_t>(i)].t)] =
            nodes[static_cast<std::size_t>(i)].v;
      }
      return out;
    }

    if ((++expanded & 255U) == 0 && deadline && Clock::now() > *deadline) {
      throw TimeoutError("low-level search deadline");
    }
    const int t2 = node.t + 1;
    if (t2 > horizon_cap) continue;
    const int count = g.neighbor_ids(node.v, nbrs);
    for (int k = 0; k <= count; ++k) {
      const VertexId n = k < count ? nbrs[static_cast<std::size_t>(k)] : node.v;
      if (ct.vertex_blocked(n, t2) || ct.edge_blocked(node.v, n, t2)) continue;
      push(n, t2, node.conflicts + counter(node.v, n, t2), top.idx);
    }
  }
  throw HorizonExceededError("no path within horizon cap");
}

}  // namespace mapfsplit::detail
