#include "mapfsplit/space_split.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>

#include "mapfsplit/errors.hpp"

namespace mapfsplit {

int SpacePartition::owner(std::size_t b, int phase) const {
  const BufferBlock& blk = blocks_.at(b);
  const bool low = (blk.type == 0) == (phase % 2 == 1);
  return low ? blk.low_region : blk.high_region;
}

VertexSubset SpacePartition::owned_blocks(int r, int phase) const {
  VertexSubset out(graph_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (owner(b, phase) != r) continue;
    for (VertexId v : blocks_[b].cells) out.insert(v);
  }
  return out;
}

VertexSubset SpacePartition::region_graph(int r, int phase) const {
  return region(r) + owned_blocks(r, phase);
}

int SpacePartition::region_of(VertexId v, int phase) const {
  if (!graph_->is_vertex(v)) return -1;
  const int home = home_[static_cast<std::size_t>(v)];
  if (home >= 0) return home;
  return owner(static_cast<std::size_t>(block_of_[static_cast<std::size_t>(v)]), phase);
}

int SpacePartition::region_distance(int a, int b) const {
  return std::abs(a % l_ - b % l_) + std::abs(a / l_ - b / l_);
}

VertexSubset SpacePartition::buffer_zone(int type) const {
  VertexSubset out(graph_);
  for (const BufferBlock& b : blocks_) {
    if (b.type != type) continue;
    for (VertexId v : b.cells) out.insert(v);
  }
  return out;
}

namespace {

struct Strip {
  int lo;
  int hi;
};

/// Even cut positions and the strips around them along one axis.
std::vector<Strip> strips_for(int extent, int parts, int across, const char* axis) {
  std::vector<Strip> out;
  for (int c = 1; c < parts; ++c) {
    const int cut = c * extent / parts;  // last cell of the lower side
    out.push_back({cut - across / 2 + 1, cut + (across + 1) / 2});
  }
  int previous_hi = 0;
  for (const Strip& s : out) {
    if (s.lo <= previous_hi + 1) {
      throw PartitionError(std::string("regions along ") + axis + " are too small for the buffer");
    }
    previous_hi = s.hi;
  }
  if (!out.empty() && previous_hi >= extent) {
    throw PartitionError(std::string("regions along ") + axis + " are too small for the buffer");
  }
  return out;
}

int band_of(int x, int extent, int parts) {
  int band = 0;
  for (int c = 1; c < parts; ++c) {
    if (x > c * extent / parts) band = c;
  }
  return band;
}

int strip_index(int x, const std::vector<Strip>& strips) {
  for (std::size_t i = 0; i < strips.size(); ++i) {
    if (x >= strips[i].lo && x <= strips[i].hi) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

SpacePartition build_partition(std::shared_ptr<const GridGraph> graph, int l, int m, BufferDims dims) {
  if (!graph) throw DomainError("partition needs a graph");
  if (l < 1 || m < 1 || l * m < 2) throw PartitionError("need at least two regions");
  if (dims.across < 1 || dims.along < 1) throw PartitionError("buffer blocks need positive size");
  const GridGraph& g = *graph;
  const int w = g.width();
  const int h = g.height();
  const auto vstrips = strips_for(w, l, dims.across, "x");
  const auto hstrips = strips_for(h, m, dims.across, "y");

  SpacePartition part;
  part.graph_ = graph;
  part.l_ = l;
  part.m_ = m;
  part.dims_ = dims;
  const auto cells = static_cast<std::size_t>(g.cell_count());
  part.block_of_.assign(cells, -1);
  part.home_.assign(cells, -1);

  auto positional = [&](VertexId v) {
    const Vertex x = g.vertex(v);
    return band_of(x.col, w, l) + l * band_of(x.row, h, m);
  };
  for (VertexId v = 0; v < g.cell_count(); ++v) {
    if (g.is_vertex(v)) part.home_[static_cast<std::size_t>(v)] = positional(v);
  }

  // Blocks along every cut, skipping squares where strips cross.
  auto lay_blocks = [&](bool vertical) {
    const auto& cuts = vertical ? vstrips : hstrips;
    const auto& crossing = vertical ? hstrips : vstrips;
    const int along_extent = vertical ? h : w;
    for (std::size_t c = 0; c < cuts.size(); ++c) {
      int running = 0;
      int pos = 1;
      while (pos <= along_extent) {
        if (strip_index(pos, crossing) >= 0) {
          ++pos;
          continue;
        }
        int end = pos;
        while (end + 1 <= along_extent && end + 1 < pos + dims.along && strip_index(end + 1, crossing) < 0) ++end;
        BufferBlock blk;
        blk.vertical_cut = vertical;
        blk.cut = static_cast<int>(c) + 1;
        const int band = vertical ? band_of(pos, h, m) : band_of(pos, w, l);
        if (vertical) {
          blk.low_region = static_cast<int>(c) + l * band;
          blk.high_region = static_cast<int>(c) + 1 + l * band;
        } else {
          blk.low_region = band + l * static_cast<int>(c);
          blk.high_region = band + l * (static_cast<int>(c) + 1);
        }
        blk.type = running % 2;
        for (int a = cuts[c].lo; a <= cuts[c].hi; ++a) {
          for (int b = pos; b <= end; ++b) {
            const Vertex v = vertical ? Vertex{a, b} : Vertex{b, a};
            if (g.is_vertex(v)) blk.cells.push_back(g.id_unchecked(v));
          }
        }
        std::sort(blk.cells.begin(), blk.cells.end());
        part.blocks_.push_back(std::move(blk));
        ++running;
        pos = end + 1;
      }
    }
  };
  lay_blocks(true);
  lay_blocks(false);

  auto claim = [&](std::size_t b) {
    for (VertexId v : part.blocks_[b].cells) {
      part.block_of_[static_cast<std::size_t>(v)] = static_cast<int>(b);
      part.home_[static_cast<std::size_t>(v)] = -1;
    }
  };
  auto dissolve = [&](std::size_t b) {
    for (VertexId v : part.blocks_[b].cells) {
      part.block_of_[static_cast<std::size_t>(v)] = -1;
      part.home_[static_cast<std::size_t>(v)] = positional(v);
    }
    part.blocks_[b].cells.clear();
  };
  for (std::size_t b = 0; b < part.blocks_.size(); ++b) claim(b);

  std::array<VertexId, 4> nb{};
  // A block is usable when its free cells are connected and touch region
  // cells of both sides.
  for (std::size_t b = 0; b < part.blocks_.size(); ++b) {
    BufferBlock& blk = part.blocks_[b];
    if (blk.cells.empty()) continue;
    std::vector<VertexId> seen{blk.cells.front()};
    std::deque<VertexId> q{blk.cells.front()};
    bool low = false;
    bool high = false;
    while (!q.empty()) {
      const VertexId v = q.front();
      q.pop_front();
      const int count = g.neighbor_ids(v, nb);
      for (int k = 0; k < count; ++k) {
        const VertexId u = nb[static_cast<std::size_t>(k)];
        const int home = part.home_[static_cast<std::size_t>(u)];
        low = low || home == blk.low_region;
        high = high || home == blk.high_region;
        if (part.block_of_[static_cast<std::size_t>(u)] == static_cast<int>(b) &&
            std::find(seen.begin(), seen.end(), u) == seen.end()) {
          seen.push_back(u);
          q.push_back(u);
        }
      }
    }
    if (seen.size() != blk.cells.size() || !low || !high) dissolve(b);
  }

  // Full-graph components.
  std::vector<int> comp(cells, -1);
  {
    int next = 0;
    for (VertexId s = 0; s < g.cell_count(); ++s) {
      if (!g.is_vertex(s) || comp[static_cast<std::size_t>(s)] >= 0) continue;
      std::deque<VertexId> q{s};
      comp[static_cast<std::size_t>(s)] = next;
      while (!q.empty()) {
        const VertexId v = q.front();
        q.pop_front();
        const int count = g.neighbor_ids(v, nb);
        for (int k = 0; k < count; ++k) {
          const VertexId u = nb[static_cast<std::size_t>(k)];
          if (comp[static_cast<std::size_t>(u)] < 0) {
            comp[static_cast<std::size_t>(u)] = next;
            q.push_back(u);
          }
        }
      }
      ++next;
    }
  }

  // Repairs one stray pocket of some region subgraph; false when none left.
  auto repair_once = [&]() -> bool {
    std::vector<int> label(cells, -1);
    for (int phase = 1; phase <= 2; ++phase) {
      std::fill(label.begin(), label.end(), -1);
      std::vector<std::vector<VertexId>> pieces;
      std::vector<int> piece_region;
      for (VertexId s = 0; s < g.cell_count(); ++s) {
        if (!g.is_vertex(s) || label[static_cast<std::size_t>(s)] >= 0) continue;
        const int r = part.region_of(s, phase);
        std::vector<VertexId> piece{s};
        label[static_cast<std::size_t>(s)] = static_cast<int>(pieces.size());
        for (std::size_t i = 0; i < piece.size(); ++i) {
          const int count = g.neighbor_ids(piece[i], nb);
          for (int k = 0; k < count; ++k) {
            const VertexId u = nb[static_cast<std::size_t>(k)];
            if (label[static_cast<std::size_t>(u)] < 0 && part.region_of(u, phase) == r) {
              label[static_cast<std::size_t>(u)] = static_cast<int>(pieces.size());
              piece.push_back(u);
            }
          }
        }
        pieces.push_back(std::move(piece));
        piece_region.push_back(r);
      }
      // Largest piece per (region, full component) stays; others are stray.
      std::vector<std::size_t> order(pieces.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return pieces[a].size() > pieces[b].size(); });
      std::vector<std::pair<int, int>> kept;
      for (std::size_t idx : order) {
        const auto key = std::make_pair(piece_region[idx], comp[static_cast<std::size_t>(pieces[idx].front())]);
        if (std::find(kept.begin(), kept.end(), key) == kept.end()) {
          kept.push_back(key);
          continue;
        }
        std::vector<VertexId> stray = pieces[idx];
        std::sort(stray.begin(), stray.end());
        for (VertexId v : stray) {
          const int b = part.block_of_[static_cast<std::size_t>(v)];
          if (b >= 0) {
            dissolve(static_cast<std::size_t>(b));
            return true;
          }
        }
        for (VertexId v : stray) {
          const int count = g.neighbor_ids(v, nb);
          for (int k = 0; k < count; ++k) {
            const VertexId u = nb[static_cast<std::size_t>(k)];
            if (label[static_cast<std::size_t>(u)] == static_cast<int>(idx)) continue;
            const int b = part.block_of_[static_cast<std::size_t>(u)];
            if (b >= 0) {
              for (VertexId x : stray) part.blocks_[static_cast<std::size_t>(b)].cells.push_back(x);
              std::sort(part.blocks_[static_cast<std::size_t>(b)].cells.begin(),
                        part.blocks_[static_cast<std::size_t>(b)].cells.end());
              claim(static_cast<std::size_t>(b));
            } else {
              const int other = part.home_[static_cast<std::size_t>(u)];
              for (VertexId x : stray) part.home_[static_cast<std::size_t>(x)] = other;
            }
            return true;
          }
        }
        // A stray piece always borders another region inside its component.
        throw PartitionError("isolated region pocket");
      }
    }
    return false;
  };
  int repairs = 0;
  while (repair_once()) {
    if (++repairs > g.cell_count()) throw PartitionError("region pockets could not be repaired");
  }

  // Drop dissolved blocks and check that every cut keeps one.
  std::vector<BufferBlock> kept;
  for (auto& b : part.blocks_) {
    if (!b.cells.empty()) kept.push_back(std::move(b));
  }
  part.blocks_ = std::move(kept);
  std::fill(part.block_of_.begin(), part.block_of_.end(), -1);
  for (std::size_t b = 0; b < part.blocks_.size(); ++b) claim(b);
  for (bool vertical : {true, false}) {
    const int cuts = vertical ? l - 1 : m - 1;
    for (int c = 1; c <= cuts; ++c) {
      const bool any = std::any_of(part.blocks_.begin(), part.blocks_.end(), [&](const BufferBlock& b) {
        return b.vertical_cut == vertical && b.cut == c;
      });
      if (!any) {
        throw PartitionError(std::string(vertical ? "vertical" : "horizontal") + " cut " +
                             std::to_string(c) + " has no usable buffer block");
      }
    }
  }

  part.regions_.assign(static_cast<std::size_t>(l * m), VertexSubset(graph));
  for (VertexId v = 0; v < g.cell_count(); ++v) {
    const int home = part.home_[static_cast<std::size_t>(v)];
    if (home >= 0) part.regions_[static_cast<std::size_t>(home)].insert(v);
  }
  return part;
}

RobotClass classify_robot(const SpacePartition& part, Vertex start, Vertex goal, int phase) {
  RobotClass out;
  out.from = part.region_of(start, phase);
  out.to = part.region_of(goal, phase);
  if (out.from < 0 || out.to < 0) throw DomainError("robot endpoint outside the partition");
  if (out.from == out.to) {
    out.group = out.from == 0 ? 1 : 2;
  } else {
    out.group = out.from < out.to ? 3 : 4;
  }
  return out;
}

double allocation_score(const GridGraph& g, VertexId v, int ds, int dg, const AllocationParams& p,
                        const std::vector<char>& used) {
  const Vertex x = g.vertex(v);
  int rho = 0;
  const Vertex around[4] = {{x.col + 1, x.row}, {x.col - 1, x.row}, {x.col, x.row + 1}, {x.col, x.row - 1}};
  for (const Vertex& u : around) {
    if (!g.in_bounds(u)) continue;
    if (!g.is_vertex(u) || used[static_cast<std::size_t>(g.id_unchecked(u))]) ++rho;
  }
  return p.lambda1 * (std::max<double>(ds, p.t1) + std::max<double>(dg, p.t2)) + p.lambda2 * rho + ds + dg;
}

std::optional<Vertex> allocate_intermediate(const VertexSubset& subset, Vertex from, Vertex goal,
                                            const AllocationParams& params, std::vector<char>& used,
                                            const AllocationObserver& observer) {
  const GridGraph& g = *subset.parent();
  if (used.size() != static_cast<std::size_t>(g.cell_count())) throw DomainError("H_used mask has the wrong size");
  const auto fs = g.distances_from(from);
  const auto fg = g.distances_from(goal);
  std::optional<VertexId> best;
  double best_f = 0.0;
  for (VertexId v : subset.ids()) {
    if (used[static_cast<std::size_t>(v)]) continue;
    const int ds = fs->raw(v);
    const int dg = fg->raw(v);
    if (ds == DistanceField::kUnreachable || dg == DistanceField::kUnreachable) continue;
    const double f = allocation_score(g, v, ds, dg, params, used);
    if (!best || f < best_f) {
      best = v;
      best_f = f;
    }
  }
  std::optional<Vertex> result;
  if (best) result = g.vertex(*best);
  if (observer) observer(AllocationCall{&subset, from, goal, params, &used, result});
  if (best) used[static_cast<std::size_t>(*best)] = 1;
  return result;
}

Vertex determine_intermediate(const SpacePartition& part, const RobotPhaseState& robot, int phase,
                              int phases, const AllocationParams& params, std::vector<char>& used,
                              const AllocationObserver& observer) {
  if (phase < 1 || phase >= phases) throw DomainError("intermediate states exist for phases 1..k-1 only");
  const GridGraph& g = *part.graph();
  const int r = part.region_of(robot.current, phase);
  const int target = part.region_of(robot.goal, phases);
  if (r < 0 || target < 0) throw DomainError("robot outside the partition");
  const int hops = part.region_distance(r, target);
  const int boundaries_left = phases - phase;
  if (hops > boundaries_left) {
    throw SplitError("robot cannot reach its goal region in the remaining phases");
  }
  const VertexId cur = g.id(robot.current);

  if (hops == 0) {
    const VertexSubset& home = part.region(r);
    if (robot.current == robot.goal && home.contains(cur) && !used[static_cast<std::size_t>(cur)]) {
      used[static_cast<std::size_t>(cur)] = 1;
      return robot.current;
    }
    if (auto v = allocate_intermediate(home, robot.current, robot.goal, params, used, observer)) return *v;
    throw SplitError("region " + std::to_string(r) + " has no free cell left");
  }

  // Next regions on a shortest route, column moves first.
  const int l = part.columns();
  std::vector<int> next;
  const int dc = target % l - r % l;
  const int dr = target / l - r / l;
  if (dc != 0) next.push_back(r + (dc > 0 ? 1 : -1));
  if (dr != 0) next.push_back(r + (dr > 0 ? l : -l));
  for (int n : next) {
    VertexSubset gate(part.graph());
    for (std::size_t b = 0; b < part.blocks().size(); ++b) {
      const BufferBlock& blk = part.blocks()[b];
      const bool faces = (blk.low_region == r && blk.high_region == n) || (blk.low_region == n && blk.high_region == r);
      if (faces && part.owner(b, phase) == r) {
        for (VertexId v : blk.cells) gate.insert(v);
      }
    }
    if (gate.empty()) continue;
    if (auto v = allocate_intermediate(gate, robot.current, robot.goal, params, used, observer)) return *v;
  }
  if (hops == boundaries_left) {
    throw SplitError("buffer blocks out of region " + std::to_string(r) + " are full");
  }
  if (auto v = allocate_intermediate(part.region(r), robot.current, robot.goal, params, used, observer)) return *v;
  throw SplitError("region " + std::to_string(r) + " has no free cell left");
}

std::optional<int> minimal_phases(const SpacePartition& part, const Instance& inst) {
  const int cap = part.columns() + part.rows();
  for (int k = 2; k <= cap; ++k) {
    bool ok = true;
    for (const Robot& r : inst.robots()) {
      const int from = part.region_of(r.start, 1);
      const int to = part.region_of(r.goal, k);
      if (part.region_distance(from, to) > k - 1) {
        ok = false;
        break;
      }
    }
    if (ok) return k;
  }
  return std::nullopt;
}

PhasePlan plan_phases(const Instance& inst, const SpacePartition& part, const SpaceSplitOptions& options) {
  const GridGraph& g = inst.graph();
  if (!(g == *part.graph())) throw DomainError("partition was built for another graph");
  if (options.lambda1 < 0 || options.lambda2 < 0) throw DomainError("allocation weights must be >= 0");
  PhasePlan plan;
  if (options.phases > 0) {
    plan.phases = options.phases;
  } else {
    const auto k = minimal_phases(part, inst);
    if (!k) throw SplitError("some robot needs more than l+m phases");
    plan.phases = *k;
  }
  const int K = plan.phases;
  const std::size_t n = inst.size();
  int T = 0;
  for (const Robot& r : inst.robots()) {
    const auto d = g.distance(r.start, r.goal);
    if (!d) throw SplitError("goal unreachable");
    T = std::max(T, *d);
  }

  std::vector<Vertex> cur = inst.starts();
  for (int p = 1; p <= K; ++p) {
    std::vector<Vertex> next = inst.goals();
    if (p < K) {
      AllocationParams params;
      params.lambda1 = options.lambda1;
      params.lambda2 = options.lambda2;
      params.t1 = static_cast<double>(T) / K;
      params.t2 = static_cast<double>(T) * (K - p) / K;
      std::vector<int> remaining(n);
      for (std::size_t i = 0; i < n; ++i) remaining[i] = *g.distance(cur[i], inst.robots()[i].goal);
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool ga = remaining[a] == 0;
        const bool gb = remaining[b] == 0;
        if (ga != gb) return ga;
        return remaining[a] > remaining[b];
      });
      std::vector<char> used(static_cast<std::size_t>(g.cell_count()), 0);
      for (std::size_t i : order) {
        next[i] = determine_intermediate(part, {cur[i], inst.robots()[i].goal}, p, K, params, used,
                                         options.observer);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (part.region_of(cur[i], p) != part.region_of(next[i], p)) {
          throw SplitError("robot " + std::to_string(i) + " ends outside its goal region");
        }
      }
    }
    Phase phase;
    phase.index = p;
    for (int r = 0; r < part.region_count(); ++r) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (part.region_of(cur[i], p) == r) members.push_back(i);
      }
      if (members.empty()) continue;
      auto sub = std::make_shared<const GridGraph>(part.region_graph(r, p).to_graph());
      std::vector<Robot> robots;
      for (std::size_t i : members) robots.push_back({cur[i], next[i]});
      phase.tasks.push_back(RegionTask{r, std::move(members), Instance(sub, std::move(robots))});
    }
    plan.schedule.push_back(std::move(phase));
    if (p < K) plan.states.push_back(next);
    cur = std::move(next);
  }
  return plan;
}

}  // namespace mapfsplit
