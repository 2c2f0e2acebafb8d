#include "mapfsplit/grid_graph.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "mapfsplit/errors.hpp"

namespace mapfsplit {

struct GridGraph::Cache {
  std::shared_mutex mutex;
  std::unordered_map<VertexId, std::shared_ptr<const DistanceField>> fields;
};

namespace {

std::string describe(Vertex v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::vector<std::int32_t> bfs_raw(const GridGraph& g, VertexId source) {
  std::vector<std::int32_t> dist(static_cast<std::size_t>(g.cell_count()),
                                 DistanceField::kUnreachable);
  std::vector<VertexId> queue;
  queue.reserve(static_cast<std::size_t>(g.vertex_count()));
  dist[static_cast<std::size_t>(source)] = 0;
  queue.push_back(source);
  std::array<VertexId, 4> nbrs{};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId u = queue[head];
    const std::int32_t du = dist[static_cast<std::size_t>(u)];
    const int count = g.neighbor_ids(u, nbrs);
    for (int k = 0; k < count; ++k) {
      auto& dv = dist[static_cast<std::size_t>(nbrs[static_cast<std::size_t>(k)])];
      if (dv == DistanceField::kUnreachable) {
        dv = du + 1;
        queue.push_back(nbrs[static_cast<std::size_t>(k)]);
      }
    }
  }
  return dist;
}

}  // namespace

GridGraph::GridGraph(int width, int height, std::vector<bool> blocked)
    : width_(width),
      height_(height),
      blocked_(std::move(blocked)),
      cache_(std::make_shared<Cache>()) {
  if (width <= 0 || height <= 0) {
    throw DomainError("grid dimensions must be positive");
  }
  if (blocked_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DomainError("blocked mask size does not match width*height");
  }
  for (bool b : blocked_) vertex_count_ += b ? 0 : 1;
}

GridGraph GridGraph::empty(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw DomainError("grid dimensions must be positive");
  }
  return GridGraph(width, height,
                   std::vector<bool>(static_cast<std::size_t>(width) *
                                         static_cast<std::size_t>(height),
                                     false));
}

VertexId GridGraph::id(Vertex v) const {
  if (!in_bounds(v)) throw DomainError("vertex out of bounds: " + describe(v));
  return id_unchecked(v);
}

std::vector<Vertex> GridGraph::neighbors(Vertex v) const {
  if (!is_vertex(v)) throw DomainError("not a vertex: " + describe(v));
  std::array<VertexId, 4> ids{};
  const int count = neighbor_ids(id_unchecked(v), ids);
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(vertex(ids[static_cast<std::size_t>(k)]));
  return out;
}

int GridGraph::neighbor_ids(VertexId v, std::array<VertexId, 4>& out) const noexcept {
  const int col = v % width_;
  const int row = v / width_;
  int count = 0;
  auto push = [&](VertexId n) {
    if (!blocked_[static_cast<std::size_t>(n)]) out[static_cast<std::size_t>(count++)] = n;
  };
  if (col + 1 < width_) push(v + 1);       // E
  if (col > 0) push(v - 1);                // W
  if (row + 1 < height_) push(v + width_); // N
  if (row > 0) push(v - width_);           // S
  return count;
}

bool GridGraph::adjacent(VertexId a, VertexId b) const noexcept {
  if (!is_vertex(a) || !is_vertex(b)) return false;
  const int ca = a % width_, ra = a / width_;
  const int cb = b % width_, rb = b / width_;
  return (ra == rb && (ca - cb == 1 || cb - ca == 1)) ||
         (ca == cb && (ra - rb == 1 || rb - ra == 1));
}

std::vector<Vertex> GridGraph::vertices() const {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(vertex_count_));
  for (VertexId id = 0; id < cell_count(); ++id) {
    if (!blocked_[static_cast<std::size_t>(id)]) out.push_back(vertex(id));
  }
  return out;
}

std::shared_ptr<const DistanceField> GridGraph::distances_from(Vertex source) const {
  if (!is_vertex(source)) throw DomainError("not a vertex: " + describe(source));
  return distances_from(id_unchecked(source));
}

std::shared_ptr<const DistanceField> GridGraph::distances_from(VertexId source) const {
  if (!is_vertex(source)) throw DomainError("not a vertex: " + describe(vertex(source)));
  {
    std::shared_lock lock(cache_->mutex);
    if (auto it = cache_->fields.find(source); it != cache_->fields.end()) {
      return it->second;
    }
  }
  auto field = std::make_shared<const DistanceField>(vertex(source), source,
                                                     bfs_raw(*this, source), width_);
  std::unique_lock lock(cache_->mutex);
  auto [it, inserted] = cache_->fields.emplace(source, std::move(field));
  return it->second;
}

std::optional<int> GridGraph::distance(Vertex a, Vertex b) const {
  if (!is_vertex(b)) throw DomainError("not a vertex: " + describe(b));
  return distances_from(a)->at(b);
}

std::optional<int> DistanceField::at(Vertex v) const {
  if (v.col < 1 || v.col > width_ || v.row < 1) return std::nullopt;
  const auto id = static_cast<std::size_t>((v.row - 1) * width_ + (v.col - 1));
  if (id >= dist_.size() || dist_[id] == kUnreachable) return std::nullopt;
  return dist_[id];
}

DistanceField bfs_distances(const GridGraph& g, Vertex source) {
  if (!g.is_vertex(source)) throw DomainError("not a vertex: " + describe(source));
  const VertexId sid = g.id_unchecked(source);
  return DistanceField(source, sid, bfs_raw(g, sid), g.width());
}

// --- VertexSubset -----------------------------------------------------------

VertexSubset::VertexSubset(std::shared_ptr<const GridGraph> parent)
    : parent_(std::move(parent)) {
  if (!parent_) throw DomainError("subset needs a parent graph");
  mask_.assign(static_cast<std::size_t>(parent_->cell_count()), 0);
}

VertexSubset::VertexSubset(std::shared_ptr<const GridGraph> parent,
                           const std::vector<Vertex>& members)
    : VertexSubset(std::move(parent)) {
  for (const Vertex& v : members) insert(v);
}

VertexSubset VertexSubset::all(std::shared_ptr<const GridGraph> parent) {
  VertexSubset s(std::move(parent));
  for (VertexId id = 0; id < s.parent_->cell_count(); ++id) s.insert(id);
  return s;
}

void VertexSubset::insert(Vertex v) {
  if (!parent_->in_bounds(v)) throw DomainError("vertex out of bounds: " + describe(v));
  insert(parent_->id_unchecked(v));
}

void VertexSubset::insert(VertexId id) {
  if (!parent_->is_vertex(id)) return;
  auto& m = mask_[static_cast<std::size_t>(id)];
  if (m == 0) {
    m = 1;
    ++size_;
  }
}

void VertexSubset::erase(VertexId id) {
  if (!contains(id)) return;
  mask_[static_cast<std::size_t>(id)] = 0;
  --size_;
}

bool VertexSubset::contains(Vertex v) const noexcept {
  return parent_->in_bounds(v) && contains(parent_->id_unchecked(v));
}

std::vector<Vertex> VertexSubset::vertices() const {
  std::vector<Vertex> out;
  out.reserve(size_);
  for (VertexId id = 0; id < static_cast<VertexId>(mask_.size()); ++id) {
    if (mask_[static_cast<std::size_t>(id)]) out.push_back(parent_->vertex(id));
  }
  return out;
}

std::vector<VertexId> VertexSubset::ids() const {
  std::vector<VertexId> out;
  out.reserve(size_);
  for (VertexId id = 0; id < static_cast<VertexId>(mask_.size()); ++id) {
    if (mask_[static_cast<std::size_t>(id)]) out.push_back(id);
  }
  return out;
}

std::size_t VertexSubset::edge_count() const {
  std::size_t edges = 0;
  std::array<VertexId, 4> nbrs{};
  for (VertexId id : ids()) {
    const int count = parent_->neighbor_ids(id, nbrs);
    for (int k = 0; k < count; ++k) {
      const VertexId n = nbrs[static_cast<std::size_t>(k)];
      if (n > id && contains(n)) ++edges;
    }
  }
  return edges;
}

bool VertexSubset::has_edge(Vertex a, Vertex b) const {
  if (!contains(a) || !contains(b)) return false;
  return parent_->adjacent(parent_->id_unchecked(a), parent_->id_unchecked(b));
}

GridGraph VertexSubset::to_graph() const {
  std::vector<bool> blocked(mask_.size());
  for (std::size_t i = 0; i < mask_.size(); ++i) blocked[i] = mask_[i] == 0;
  return GridGraph(parent_->width(), parent_->height(), std::move(blocked));
}

bool VertexSubset::connected_within_parent_components() const {
  if (size_ == 0) return true;
  // Label parent components.
  std::vector<int> parent_comp(mask_.size(), -1);
  int parent_count = 0;
  std::array<VertexId, 4> nbrs{};
  std::vector<VertexId> stack;
  for (VertexId s = 0; s < static_cast<VertexId>(mask_.size()); ++s) {
    if (!parent_->is_vertex(s) || parent_comp[static_cast<std::size_t>(s)] >= 0) continue;
    parent_comp[static_cast<std::size_t>(s)] = parent_count;
    stack.assign(1, s);
    while (!stack.empty()) {
      const VertexId u = stack.back();
      stack.pop_back();
      const int count = parent_->neighbor_ids(u, nbrs);
      for (int k = 0; k < count; ++k) {
        const VertexId n = nbrs[static_cast<std::size_t>(k)];
        if (parent_comp[static_cast<std::size_t>(n)] < 0) {
          parent_comp[static_cast<std::size_t>(n)] = parent_count;
          stack.push_back(n);
        }
      }
    }
    ++parent_count;
  }
  // Each parent component touched by the subset must appear as exactly one
  // induced component.
  std::vector<char> seen_parent(static_cast<std::size_t>(parent_count), 0);
  std::vector<char> visited(mask_.size(), 0);
  for (VertexId s = 0; s < static_cast<VertexId>(mask_.size()); ++s) {
    if (!contains(s) || visited[static_cast<std::size_t>(s)]) continue;
    const int pc = parent_comp[static_cast<std::size_t>(s)];
    if (seen_parent[static_cast<std::size_t>(pc)]) return false;
    seen_parent[static_cast<std::size_t>(pc)] = 1;
    visited[static_cast<std::size_t>(s)] = 1;
    stack.assign(1, s);
    while (!stack.empty()) {
      const VertexId u = stack.back();
      stack.pop_back();
      const int count = parent_->neighbor_ids(u, nbrs);
      for (int k = 0; k < count; ++k) {
        const VertexId n = nbrs[static_cast<std::size_t>(k)];
        if (contains(n) && !visited[static_cast<std::size_t>(n)]) {
          visited[static_cast<std::size_t>(n)] = 1;
          stack.push_back(n);
        }
      }
    }
  }
  return true;
}

VertexSubset graph_sum(const VertexSubset& a, const VertexSubset& b) {
  if (a.parent_.get() != b.parent_.get() && !(*a.parent_ == *b.parent_)) {
    throw DomainError("graph_sum: subsets of different parent grids");
  }
  VertexSubset out(a.parent_);
  for (std::size_t i = 0; i < a.mask_.size(); ++i) {
    if (a.mask_[i] || b.mask_[i]) out.insert(static_cast<VertexId>(i));
  }
  return out;
}

VertexSubset graph_difference(const VertexSubset& a, const VertexSubset& b) {
  if (a.parent_.get() != b.parent_.get() && !(*a.parent_ == *b.parent_)) {
    throw DomainError("graph_difference: subsets of different parent grids");
  }
  VertexSubset out(a.parent_);
  for (std::size_t i = 0; i < a.mask_.size(); ++i) {
    if (a.mask_[i] && !b.mask_[i]) out.insert(static_cast<VertexId>(i));
  }
  return out;
}

}  // namespace mapfsplit
