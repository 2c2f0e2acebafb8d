#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "mapfsplit/grid_graph.hpp"
#include "mapfsplit/instance.hpp"

namespace mapfsplit {

/// Buffer block size: `across` cells perpendicular to the cut line, `along`
/// cells parallel to it.
struct BufferDims {
  int across = 4;
  int along = 2;
};

struct BufferBlock {
  bool vertical_cut = true;  // cut between region columns
  int cut = 0;               // 1-based index of the cut line
  int low_region = 0;        // left or lower-row side
  int high_region = 0;
  /// Blocks alternate A (0) / B (1) along a cut. A blocks belong to the low
  /// side in odd phases, B blocks in even phases; every block changes hands
  /// each phase.
  int type = 0;
  std::vector<VertexId> cells;  // unblocked cells only
};

/// l x m regions separated by buffer strips. Region r = column + l * row,
/// columns counted along x and rows along y (1-based cells).
class SpacePartition {
 public:
  const std::shared_ptr<const GridGraph>& graph() const noexcept { return graph_; }
  int columns() const noexcept { return l_; }
  int rows() const noexcept { return m_; }
  int region_count() const noexcept { return l_ * m_; }
  BufferDims dims() const noexcept { return dims_; }

  /// G_r without any buffer block.
  const VertexSubset& region(int r) const { return regions_.at(static_cast<std::size_t>(r)); }
  const std::vector<BufferBlock>& blocks() const noexcept { return blocks_; }

  /// Owner of block b in phase p (1-based).
  int owner(std::size_t b, int phase) const;
  /// Blocks owned by region r in phase p (B_r of that phase).
  VertexSubset owned_blocks(int r, int phase) const;
  /// G_r plus the blocks r owns in phase p.
  VertexSubset region_graph(int r, int phase) const;
  /// Region whose subgraph holds cell v in phase p; -1 for obstacles.
  int region_of(VertexId v, int phase) const;
  int region_of(Vertex v, int phase) const { return region_of(graph_->id(v), phase); }
  /// Block index of v, or -1 for region cells.
  int block_of(VertexId v) const { return block_of_.at(static_cast<std::size_t>(v)); }

  /// Manhattan distance between regions in the l x m grid.
  int region_distance(int a, int b) const;

  /// The union of all A blocks and of all B blocks (B_1, B_2 of the
  /// two-region case).
  VertexSubset buffer_zone(int type) const;

 private:
  friend SpacePartition build_partition(std::shared_ptr<const GridGraph>, int, int, BufferDims);

  std::shared_ptr<const GridGraph> graph_;
  int l_ = 1;
  int m_ = 1;
  BufferDims dims_;
  std::vector<VertexSubset> regions_;
  std::vector<BufferBlock> blocks_;
  std::vector<int> block_of_;   // per cell
  std::vector<int> home_;       // per cell: region for region cells, -1 otherwise
};

/// Cuts at even spacing; each cut is covered by a strip of `dims.across`
/// cells made of blocks `dims.along` long, skipping the squares where cuts
/// cross. Blocks without free cells, with disconnected free cells, or not
/// touching both sides are dissolved into the regions, and stray pockets
/// are merged until every region subgraph of every phase has one component
/// per component of the full graph it touches.
///
/// Throws PartitionError on degenerate sizes, a cut without usable blocks,
/// or pockets that cannot be repaired.
SpacePartition build_partition(std::shared_ptr<const GridGraph> graph, int l, int m,
                               BufferDims dims = {});

/// The four start/goal cases, judged on phase-`phase` membership:
/// 1 both in region 0, 2 both in the same other region, 3 from a lower to a
/// higher region index, 4 the reverse.
struct RobotClass {
  int from = 0;
  int to = 0;
  int group = 1;
};

RobotClass classify_robot(const SpacePartition& part, Vertex start, Vertex goal, int phase = 1);

struct AllocationParams {
  double lambda1 = 1.0;
  double lambda2 = 2.0;
  double t1 = 0.0;
  double t2 = 0.0;
};

/// f(v) = l1*(max(ds, T1) + max(dg, T2)) + l2*rho(v) + ds + dg, with ds, dg
/// full-graph distances and rho the blocked or used 4-neighbours of v.
double allocation_score(const GridGraph& g, VertexId v, int ds, int dg, const AllocationParams& p,
                        const std::vector<char>& used);

/// One allocate() call, reported before H_used is updated.
struct AllocationCall {
  const VertexSubset* subset;
  Vertex from;
  Vertex goal;
  AllocationParams params;
  const std::vector<char>* used;
  std::optional<Vertex> result;
};

using AllocationObserver = std::function<void(const AllocationCall&)>;

/// argmin f over subset minus H_used (cells reachable from both ends),
/// first in row-major order on ties. Marks the pick in `used` (one flag per
/// cell). nullopt when nothing is left.
std::optional<Vertex> allocate_intermediate(const VertexSubset& subset, Vertex from, Vertex goal,
                                            const AllocationParams& params, std::vector<char>& used,
                                            const AllocationObserver& observer = nullptr);

struct RobotPhaseState {
  Vertex current;
  Vertex goal;
};

/// Where a robot should be at the end of phase p < phases: inside its
/// region when it already is in its final region, otherwise in a block its
/// region owns toward the next region on a shortest region route, falling
/// back to the region itself when those blocks are full. Throws SplitError
/// if every fallback is exhausted.
Vertex determine_intermediate(const SpacePartition& part, const RobotPhaseState& robot, int phase,
                              int phases, const AllocationParams& params, std::vector<char>& used,
                              const AllocationObserver& observer = nullptr);

struct RegionTask {
  int region = 0;
  std::vector<std::size_t> robots;  // indices into the original instance
  Instance instance;                // on the region subgraph of the phase
};

struct Phase {
  int index = 1;
  std::vector<RegionTask> tasks;  // non-empty regions only
};

struct SpaceSplitOptions {
  double lambda1 = 1.0;
  double lambda2 = 2.0;
  /// 0 chooses the smallest feasible count, at least 2 and at most l+m.
  int phases = 0;
  AllocationObserver observer;
};

struct PhasePlan {
  int phases = 0;
  /// states[p-1]: every robot's cell at the end of phase p < phases.
  std::vector<std::vector<Vertex>> states;
  std::vector<Phase> schedule;
};

/// Smallest phase count that lets every robot reach the region holding its
/// goal in the last phase, or nullopt beyond l+m.
std::optional<int> minimal_phases(const SpacePartition& part, const Instance& inst);

/// Intermediate states for all phases and the per-phase, per-region
/// sub-instances. Throws SplitError when routing fails.
PhasePlan plan_phases(const Instance& inst, const SpacePartition& part,
                      const SpaceSplitOptions& options = {});

}  // namespace mapfsplit
