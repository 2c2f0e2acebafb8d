#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

namespace mapfsplit {

/// A grid cell, 1-based: 1 <= col <= width, 1 <= row <= height.
struct Vertex {
  int col = 0;
  int row = 0;

  friend bool operator==(const Vertex&, const Vertex&) = default;
  /// Row-major order.
  friend std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) {
    if (auto c = a.row <=> b.row; c != 0) return c;
    return a.col <=> b.col;
  }
  friend std::ostream& operator<<(std::ostream& os, const Vertex& v) {
    return os << '(' << v.col << ',' << v.row << ')';
  }
};

/// Dense row-major cell index, `(row-1)*width + (col-1)`. Blocked cells have
/// ids too; they are simply never vertices.
using VertexId = std::int32_t;

class DistanceField;

/// Undirected 4-connected grid graph with obstacles.
///
/// Immutable after construction. Distance fields are computed on demand and
/// cached per source; the cache is shared by copies of the graph and is safe
/// to query from several threads.
class GridGraph {
 public:
  /// `blocked` is row-major with `width*height` entries.
  GridGraph(int width, int height, std::vector<bool> blocked);
  static GridGraph empty(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int cell_count() const noexcept { return width_ * height_; }
  /// Number of unblocked cells.
  int vertex_count() const noexcept { return vertex_count_; }

  bool in_bounds(Vertex v) const noexcept {
    return v.col >= 1 && v.col <= width_ && v.row >= 1 && v.row <= height_;
  }
  bool is_vertex(Vertex v) const noexcept {
    return in_bounds(v) && !blocked_[static_cast<std::size_t>(id_unchecked(v))];
  }
  bool is_vertex(VertexId id) const noexcept {
    return id >= 0 && id < cell_count() && !blocked_[static_cast<std::size_t>(id)];
  }
  bool blocked(Vertex v) const noexcept { return !is_vertex(v); }

  /// Throws DomainError if `v` is out of bounds.
  VertexId id(Vertex v) const;
  VertexId id_unchecked(Vertex v) const noexcept {
    return (v.row - 1) * width_ + (v.col - 1);
  }
  Vertex vertex(VertexId id) const noexcept {
    return Vertex{id % width_ + 1, id / width_ + 1};
  }

  /// Unblocked axis-adjacent cells in E, W, N, S order, where N is row+1.
  /// Throws DomainError if `v` is not a vertex.
  std::vector<Vertex> neighbors(Vertex v) const;

  /// Same as neighbors() on ids; returns the count written to `out`.
  int neighbor_ids(VertexId v, std::array<VertexId, 4>& out) const noexcept;

  bool adjacent(VertexId a, VertexId b) const noexcept;

  /// All vertices in row-major order.
  std::vector<Vertex> vertices() const;

  const std::vector<bool>& blocked_mask() const noexcept { return blocked_; }

  /// Cached BFS field from `source`. Throws DomainError on a non-vertex.
  std::shared_ptr<const DistanceField> distances_from(Vertex source) const;
  std::shared_ptr<const DistanceField> distances_from(VertexId source) const;

  /// Shortest distance, or nullopt when unreachable.
  std::optional<int> distance(Vertex a, Vertex b) const;

  friend bool operator==(const GridGraph& a, const GridGraph& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.blocked_ == b.blocked_;
  }

 private:
  struct Cache;

  int width_;
  int height_;
  int vertex_count_ = 0;
  std::vector<bool> blocked_;
  std::shared_ptr<Cache> cache_;
};

/// Exact unweighted distances from one source over a GridGraph.
class DistanceField {
 public:
  static constexpr std::int32_t kUnreachable = -1;

  DistanceField(Vertex source, VertexId source_id,
                std::vector<std::int32_t> dist, int width)
      : source_(source),
        source_id_(source_id),
        dist_(std::move(dist)),
        width_(width) {}

  Vertex source() const noexcept { return source_; }
  VertexId source_id() const noexcept { return source_id_; }

  /// nullopt for unreachable or non-vertex cells.
  std::optional<int> at(Vertex v) const;
  /// Raw value; kUnreachable for unreachable or blocked cells.
  std::int32_t raw(VertexId id) const noexcept {
    return dist_[static_cast<std::size_t>(id)];
  }
  bool reachable(VertexId id) const noexcept { return raw(id) != kUnreachable; }
  const std::vector<std::int32_t>& raw_values() const noexcept { return dist_; }

 private:
  Vertex source_;
  VertexId source_id_;
  std::vector<std::int32_t> dist_;
  int width_;
};

/// Uncached BFS.
DistanceField bfs_distances(const GridGraph& g, Vertex source);

/// A set of vertices of one parent grid; edges are the parent edges with
/// both endpoints in the set.
class VertexSubset {
 public:
  explicit VertexSubset(std::shared_ptr<const GridGraph> parent);
  VertexSubset(std::shared_ptr<const GridGraph> parent,
               const std::vector<Vertex>& members);

  static VertexSubset all(std::shared_ptr<const GridGraph> parent);

  const std::shared_ptr<const GridGraph>& parent() const noexcept {
    return parent_;
  }

  /// Ignores blocked cells.
  void insert(Vertex v);
  void insert(VertexId id);
  void erase(VertexId id);
  bool contains(Vertex v) const noexcept;
  bool contains(VertexId id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < mask_.size() &&
           mask_[static_cast<std::size_t>(id)] != 0;
  }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  /// Members in row-major order.
  std::vector<Vertex> vertices() const;
  std::vector<VertexId> ids() const;

  /// Number of edges of the induced subgraph.
  std::size_t edge_count() const;
  bool has_edge(Vertex a, Vertex b) const;

  /// The induced subgraph as a standalone grid of the parent's dimensions
  /// (cells outside the subset become blocked).
  GridGraph to_graph() const;

  /// True when the induced subgraph has one connected component per parent
  /// component it touches.
  bool connected_within_parent_components() const;

  friend bool operator==(const VertexSubset& a, const VertexSubset& b) {
    return (a.parent_.get() == b.parent_.get() || *a.parent_ == *b.parent_) &&
           a.mask_ == b.mask_;
  }

 private:
  std::shared_ptr<const GridGraph> parent_;
  std::vector<char> mask_;
  std::size_t size_ = 0;

  friend VertexSubset graph_sum(const VertexSubset&, const VertexSubset&);
  friend VertexSubset graph_difference(const VertexSubset&,
                                       const VertexSubset&);
};

/// Union of two subsets of the same parent. Throws DomainError otherwise.
VertexSubset graph_sum(const VertexSubset& a, const VertexSubset& b);
/// Members of `a` not in `b`.
VertexSubset graph_difference(const VertexSubset& a, const VertexSubset& b);

inline VertexSubset operator+(const VertexSubset& a, const VertexSubset& b) {
  return graph_sum(a, b);
}
inline VertexSubset operator-(const VertexSubset& a, const VertexSubset& b) {
  return graph_difference(a, b);
}

}  // namespace mapfsplit
