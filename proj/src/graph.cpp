#include "anytrack/graph.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace anytrack {

bool edge_feasible(const JointConfig& a, const JointConfig& b, double dt, const KinematicChain& chain) {
  for (int j = 0; j < chain.dof(); ++j) {
    if (std::abs(b[j] - a[j]) > chain.joint(j).vel_max * dt) return false;
  }
  return true;
}

double joint_distance(const JointConfig& a, const JointConfig& b) { return (b - a).norm(); }

std::span<const std::uint32_t> EdgeBlock::feasible_from(std::uint32_t from_slot) const {
  if (from_slot >= feasible_.size()) return {};
  return feasible_[from_slot];
}

bool EdgeBlock::is_feasible(std::uint32_t from_slot, std::uint32_t to_slot) const {
  const auto row = feasible_from(from_slot);
  return std::binary_search(row.begin(), row.end(), to_slot);
}

bool EdgeBlock::is_removed(std::uint32_t from_slot, std::uint32_t to_slot) const {
  return !removed_.empty() && removed_.count(key(from_slot, to_slot)) > 0;
}

std::optional<EdgeKind> EdgeBlock::kind(std::uint32_t from_slot, std::uint32_t to_slot) const {
  if (from_slot >= rows_ || to_slot >= cols_ || is_removed(from_slot, to_slot)) return std::nullopt;
  if (is_feasible(from_slot, to_slot)) return sparse_ ? EdgeKind::Sparse : EdgeKind::Dense;
  if (from_slot < rc_rows_ && to_slot < rc_cols_) {
    return sparse_ ? EdgeKind::SparseReconfig : EdgeKind::DenseReconfig;
  }
  return std::nullopt;
}

LayeredGraph::LayeredGraph(Trajectory trajectory, double merge_radius)
    : trajectory_(std::move(trajectory)),
      merge_radius_(merge_radius),
      layers_(trajectory_.size()),
      sparse_out_(trajectory_.size()) {
  dense_.reserve(layers_.size() - 1);
  for (std::size_t x = 0; x + 1 < layers_.size(); ++x) {
    dense_.emplace_back(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(x + 1), false);
  }
}

std::size_t LayeredGraph::vertex_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.size();
  return n;
}

std::vector<VertexId> LayeredGraph::add_vertices(std::size_t x, std::span<const JointConfig> configs) {
  auto& layer = layers_.at(x);
  std::vector<VertexId> added;
  for (const auto& q : configs) {
    const bool duplicate = std::any_of(layer.begin(), layer.end(), [&](const JointConfig& k) {
      return max_abs_diff(k, q) <= merge_radius_;
    });
    if (duplicate) continue;
    added.push_back({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(layer.size())});
    layer.push_back(q);
  }
  return added;
}

std::size_t LayeredGraph::connect(EdgeBlock& block, const KinematicChain& chain, bool allow_reconfig) {
  const auto& from = layers_[block.from_];
  const auto& to = layers_[block.to_];
  const double dt = time(block.to_) - time(block.from_);
  const std::size_t rows = from.size(), cols = to.size();
  std::size_t added = 0;

  // Feasible edges over the pairs outside the processed rectangle.
  block.feasible_.resize(rows);
  for (std::size_t u = 0; u < rows; ++u) {
    const std::size_t v_begin = u < block.rows_ ? block.cols_ : 0;
    auto& out = block.feasible_[u];
    for (std::size_t v = v_begin; v < cols; ++v) {
      ++pairs_checked_;
      if (edge_feasible(from[u], to[v], dt, chain)) {
        out.push_back(static_cast<std::uint32_t>(v));
        ++added;
        ++block.feasible_count_;
      }
    }
  }
  block.rows_ = rows;
  block.cols_ = cols;

  if (allow_reconfig) {
    for (std::size_t u = 0; u < rows; ++u) {
      const std::size_t v_begin = u < block.rc_rows_ ? block.rc_cols_ : 0;
      const auto row = block.feasible_from(static_cast<std::uint32_t>(u));
      auto it = std::lower_bound(row.begin(), row.end(), static_cast<std::uint32_t>(v_begin));
      const auto feasible_in_range = static_cast<std::size_t>(row.end() - it);
      const std::size_t infeasible = (cols - v_begin) - feasible_in_range;
      added += infeasible;
      block.reconfig_count_ += infeasible;
    }
    block.rc_rows_ = rows;
    block.rc_cols_ = cols;
  }
  return added;
}

std::size_t LayeredGraph::connect_dense(std::size_t x, const KinematicChain& chain, bool allow_reconfig) {
  if (x + 1 >= layers_.size()) throw std::out_of_range("connect_dense: layer has no successor");
  return connect(dense_[x], chain, allow_reconfig);
}

EdgeBlock* LayeredGraph::mutable_sparse_block(std::size_t x, std::size_t x2) {
  for (std::size_t idx : sparse_out_[x]) {
    if (sparse_[idx].to_ == x2) return &sparse_[idx];
  }
  return nullptr;
}

std::size_t LayeredGraph::connect_sparse(std::size_t x, std::size_t x2, const KinematicChain& chain,
                                         bool allow_reconfig) {
  if (x2 >= layers_.size()) throw std::out_of_range("connect_sparse: layer out of range");
  if (x2 < x + 2) throw std::invalid_argument("sparse edges must span at least two layers");
  EdgeBlock* block = mutable_sparse_block(x, x2);
  if (!block) {
    sparse_.emplace_back(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(x2), true);
    auto& out = sparse_out_[x];
    out.push_back(sparse_.size() - 1);
    std::sort(out.begin(), out.end(),
              [&](std::size_t a, std::size_t b) { return sparse_[a].to_ < sparse_[b].to_; });
    block = &sparse_.back();
  }
  return connect(*block, chain, allow_reconfig);
}

bool LayeredGraph::dense_reachable(VertexId u, VertexId v, bool allow_reconfig_edges) const {
  if (v.layer <= u.layer) return false;
  std::vector<char> reach(layers_[u.layer].size(), 0);
  reach[u.slot] = 1;
  for (std::size_t x = u.layer; x < v.layer; ++x) {
    const EdgeBlock& block = dense_[x];
    std::vector<char> next(layers_[x + 1].size(), 0);
    bool any = false;
    for (std::uint32_t a = 0; a < reach.size(); ++a) {
      if (!reach[a]) continue;
      for (std::uint32_t b : block.feasible_from(a)) next[b] = 1, any = true;
      if (allow_reconfig_edges && a < block.rc_rows_) {
        for (std::uint32_t b = 0; b < block.rc_cols_; ++b) {
          if (!next[b] && !block.is_feasible(a, b)) next[b] = 1, any = true;
        }
      }
    }
    if (!any) return false;
    reach.swap(next);
  }
  return v.slot < reach.size() && reach[v.slot];
}

std::size_t LayeredGraph::supersede_sparse(const PathResult& guide) {
  std::size_t removed = 0;
  for (std::size_t i = 0; i < guide.edges.size(); ++i) {
    const EdgeKind k = guide.edges[i];
    if (!is_sparse(k)) continue;
    const VertexId u = guide.vertices[i];
    const VertexId v = guide.vertices[i + 1];
    EdgeBlock* block = mutable_sparse_block(u.layer, v.layer);
    if (!block || block->kind(u.slot, v.slot) != k) continue;
    if (!dense_reachable(u, v, k == EdgeKind::SparseReconfig)) continue;
    block->remove(u.slot, v.slot, k);
    ++removed;
  }
  return removed;
}

bool LayeredGraph::retire_sparse(VertexId u, VertexId v) {
  EdgeBlock* block = mutable_sparse_block(u.layer, v.layer);
  if (!block) return false;
  const auto k = block->kind(u.slot, v.slot);
  if (!k) return false;
  block->remove(u.slot, v.slot, *k);
  return true;
}

void EdgeBlock::remove(std::uint32_t from_slot, std::uint32_t to_slot, EdgeKind k) {
  removed_.insert(key(from_slot, to_slot));
  if (is_reconfig(k)) {
    ++removed_reconfig_;
  } else {
    ++removed_feasible_;
  }
}

Edge LayeredGraph::make_edge(VertexId u, VertexId v, EdgeKind kind) const {
  return Edge{u, v, kind, joint_distance(config(u), config(v)), is_reconfig(kind) ? 1 : 0};
}

const EdgeBlock* LayeredGraph::dense_block(std::size_t x) const {
  return x < dense_.size() ? &dense_[x] : nullptr;
}

const EdgeBlock* LayeredGraph::sparse_block(std::size_t x, std::size_t x2) const {
  if (x >= sparse_out_.size()) return nullptr;
  for (std::size_t idx : sparse_out_[x]) {
    if (sparse_[idx].to_ == x2) return &sparse_[idx];
  }
  return nullptr;
}

std::vector<const EdgeBlock*> LayeredGraph::sparse_blocks_from(std::size_t x) const {
  std::vector<const EdgeBlock*> out;
  for (std::size_t idx : sparse_out_.at(x)) out.push_back(&sparse_[idx]);
  return out;
}

std::optional<Edge> LayeredGraph::find_edge(VertexId u, VertexId v) const {
  if (v.layer <= u.layer || v.layer >= layers_.size()) return std::nullopt;
  const EdgeBlock* block = v.layer == u.layer + 1 ? dense_block(u.layer) : sparse_block(u.layer, v.layer);
  if (!block) return std::nullopt;
  const auto kind = block->kind(u.slot, v.slot);
  if (!kind) return std::nullopt;
  return make_edge(u, v, *kind);
}

std::vector<Edge> LayeredGraph::edges_from(VertexId u) const {
  std::vector<Edge> out;
  auto collect = [&](const EdgeBlock& block) {
    if (u.slot >= block.rows_) return;
    for (std::uint32_t b = 0; b < block.cols_; ++b) {
      if (auto k = block.kind(u.slot, b)) out.push_back(make_edge(u, {block.to_, b}, *k));
    }
  };
  if (u.layer < dense_.size()) collect(dense_[u.layer]);
  for (std::size_t idx : sparse_out_.at(u.layer)) collect(sparse_[idx]);
  return out;
}

GraphSummary LayeredGraph::summary() const {
  GraphSummary s;
  for (const auto& l : layers_) {
    s.vertices_per_layer.push_back(l.size());
    s.vertex_total += l.size();
  }
  for (const auto& b : dense_) {
    s.dense += b.feasible_count();
    s.dense_reconfig += b.reconfig_count();
  }
  for (const auto& b : sparse_) {
    s.sparse += b.feasible_count();
    s.sparse_reconfig += b.reconfig_count();
  }
  return s;
}

std::string LayeredGraph::summary_json() const {
  const GraphSummary s = summary();
  nlohmann::json j;
  j["layers"] = layers_.size();
  j["vertices_per_layer"] = s.vertices_per_layer;
  j["vertex_total"] = s.vertex_total;
  j["edges"] = {{"dense", s.dense},
                {"sparse", s.sparse},
                {"dense_reconfig", s.dense_reconfig},
                {"sparse_reconfig", s.sparse_reconfig}};
  return j.dump(2);
}

}  // namespace anytrack
