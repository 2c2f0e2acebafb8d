#include "mapfsplit/search.hpp"

#include <array>
#include <cstdlib>
#include <queue>
#include <tuple>

#include "mapfsplit/errors.hpp"
#include "spacetime_search.hpp"

namespace mapfsplit {

Path astar_shortest(const GridGraph& g, Vertex start, Vertex goal) {
  if (!g.is_vertex(start) || !g.is_vertex(goal)) {
    throw DomainError("astar_shortest: endpoints must be vertices");
  }
  const VertexId s = g.id_unchecked(start);
  const VertexId t = g.id_unchecked(goal);
  auto manhattan = [&](VertexId v) {
    const Vertex a = g.vertex(v);
    return std::abs(a.col - goal.col) + std::abs(a.row - goal.row);
  };
  // (f, h, seq, vertex); smallest first.
  using Entry = std::tuple<int, int, std::uint64_t, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<int> best_g(static_cast<std::size_t>(g.cell_count()), -1);
  std::vector<VertexId> parent(static_cast<std::size_t>(g.cell_count()), -1);
  std::vector<char> closed(static_cast<std::size_t>(g.cell_count()), 0);
  std::uint64_t seq = 0;
  best_g[static_cast<std::size_t>(s)] = 0;
  open.emplace(manhattan(s), manhattan(s), seq++, s);
  std::array<VertexId, 4> nbrs{};
  while (!open.empty()) {
    const auto [f, h, order, u] = open.top();
    open.pop();
    if (closed[static_cast<std::size_t>(u)]) continue;
    closed[static_cast<std::size_t>(u)] = 1;
    if (u == t) {
      Path path;
      for (VertexId v = t; v != -1; v = parent[static_cast<std::size_t>(v)]) {
        path.push_back(g.vertex(v));
      }
      return Path(path.rbegin(), path.rend());
    }
    const int gu = best_g[static_cast<std::size_t>(u)];
    const int count = g.neighbor_ids(u, nbrs);
    for (int k = 0; k < count; ++k) {
      const VertexId n = nbrs[static_cast<std::size_t>(k)];
      auto& gn = best_g[static_cast<std::size_t>(n)];
      if (closed[static_cast<std::size_t>(n)] || (gn >= 0 && gn <= gu + 1)) continue;
      gn = gu + 1;
      parent[static_cast<std::size_t>(n)] = u;
      const int hn = manhattan(n);
      open.emplace(gn + hn, hn, seq++, n);
    }
  }
  throw NoPathError("goal unreachable from start");
}

int default_horizon_cap(const GridGraph& g) { return 2 * g.cell_count(); }

SearchResult constrained_spacetime_search(const GridGraph& g, Vertex start, Vertex goal,
                                          const std::vector<Constraint>& constraints,
                                          const SpaceTimeOptions& options,
                                          const ConflictCounter& conflicts) {
  if (!g.is_vertex(start) || !g.is_vertex(goal)) {
    throw DomainError("constrained_spacetime_search: endpoints must be vertices");
  }
  if (options.focal_weight < 1.0) throw DomainError("focal weight must be >= 1");
  const VertexId s = g.id_unchecked(start);
  const VertexId t = g.id_unchecked(goal);
  detail::ConstraintTable table;
  for (const Constraint& c : constraints) {
    if (!g.in_bounds(c.cell) || (c.kind == Constraint::Kind::kEdge && !g.in_bounds(c.to))) {
      throw DomainError("constraint cell out of bounds");
    }
    if (c.kind == Constraint::Kind::kVertex) {
      table.add_vertex(g.id_unchecked(c.cell), c.time, t);
    } else {
      if (c.time < 1) throw DomainError("edge constraint time must be >= 1");
      table.add_edge(g.id_unchecked(c.cell), g.id_unchecked(c.to), c.time);
    }
  }
  const int cap = options.horizon_cap > 0 ? options.horizon_cap : default_horizon_cap(g);
  detail::SpaceTimeIdResult raw;
  if (conflicts) {
    raw = detail::spacetime_search(g, s, t, table, cap, options.focal_weight,
                                   options.deadline, conflicts);
  } else {
    raw = detail::spacetime_search(g, s, t, table, cap, options.focal_weight,
                                   options.deadline, detail::NoConflicts{});
  }
  SearchResult out;
  out.lower_bound = raw.lower_bound;
  out.expanded = raw.expanded;
  out.path.reserve(raw.path.size());
  for (VertexId v : raw.path) out.path.push_back(g.vertex(v));
  return out;
}

}  // namespace mapfsplit
