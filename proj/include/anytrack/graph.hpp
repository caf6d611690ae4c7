#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "anytrack/ik.hpp"
#include "anytrack/kinematics.hpp"
#include "anytrack/path.hpp"
#include "anytrack/trajectory.hpp"

namespace anytrack {

struct Edge {
  VertexId from;
  VertexId to;
  EdgeKind kind = EdgeKind::Dense;
  double movement = 0.0;
  int reconfig = 0;
};

/// Per-joint velocity bound: |q_b[j] - q_a[j]| <= vel_max[j] * dt for every j.
bool edge_feasible(const JointConfig& a, const JointConfig& b, double dt, const KinematicChain& chain);

/// Euclidean joint-space distance.
double joint_distance(const JointConfig& a, const JointConfig& b);

/// Connections from one layer to a later one.
///
/// Vertices are only ever appended, so the set of vertex pairs already
/// examined is always a rectangle [0, rows) x [0, cols). Feasible edges are
/// stored explicitly; reconfiguration edges are implied for every infeasible
/// pair inside the (smaller or equal) reconfiguration rectangle. Removed sparse
/// edges are tracked by key.
class EdgeBlock {
 public:
  EdgeBlock(std::uint32_t from_layer, std::uint32_t to_layer, bool sparse)
      : from_(from_layer), to_(to_layer), sparse_(sparse) {}

  std::uint32_t from_layer() const { return from_; }
  std::uint32_t to_layer() const { return to_; }
  bool sparse() const { return sparse_; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t reconfig_rows() const { return rc_rows_; }
  std::size_t reconfig_cols() const { return rc_cols_; }

  /// Sorted to-slots of the feasible edges leaving `from_slot`.
  std::span<const std::uint32_t> feasible_from(std::uint32_t from_slot) const;
  bool is_feasible(std::uint32_t from_slot, std::uint32_t to_slot) const;
  bool is_removed(std::uint32_t from_slot, std::uint32_t to_slot) const;
  bool has_removed() const { return !removed_.empty(); }

  /// Edge kind between the two slots, if connected.
  std::optional<EdgeKind> kind(std::uint32_t from_slot, std::uint32_t to_slot) const;

  std::size_t feasible_count() const { return feasible_count_ - removed_feasible_; }
  std::size_t reconfig_count() const { return reconfig_count_ - removed_reconfig_; }

 private:
  friend class LayeredGraph;

  void remove(std::uint32_t from_slot, std::uint32_t to_slot, EdgeKind k);
  static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  std::uint32_t from_;
  std::uint32_t to_;
  bool sparse_;
  std::size_t rows_ = 0, cols_ = 0;
  std::size_t rc_rows_ = 0, rc_cols_ = 0;
  std::vector<std::vector<std::uint32_t>> feasible_;
  std::size_t feasible_count_ = 0;
  std::size_t reconfig_count_ = 0;
  std::unordered_set<std::uint64_t> removed_;
  std::size_t removed_feasible_ = 0;
  std::size_t removed_reconfig_ = 0;
};

struct GraphSummary {
  std::vector<std::size_t> vertices_per_layer;
  std::size_t dense = 0;
  std::size_t sparse = 0;
  std::size_t dense_reconfig = 0;
  std::size_t sparse_reconfig = 0;
  std::size_t vertex_total = 0;
};

/// Layered graph with one layer per waypoint. Vertices and dense edges are
/// never removed; sparse edges may be superseded.
class LayeredGraph {
 public:
  explicit LayeredGraph(Trajectory trajectory, double merge_radius = kDefaultMergeRadius);

  std::size_t num_layers() const { return layers_.size(); }
  const Trajectory& trajectory() const { return trajectory_; }
  double merge_radius() const { return merge_radius_; }
  double time(std::size_t layer) const { return trajectory_[layer].t; }

  const std::vector<JointConfig>& layer(std::size_t x) const { return layers_.at(x); }
  const JointConfig& config(VertexId v) const { return layers_[v.layer][v.slot]; }
  std::size_t vertex_count() const;

  /// Appends the configs not within merge_radius of the layer's current
  /// content (or of each other). Returns ids of the retained ones only.
  std::vector<VertexId> add_vertices(std::size_t x, std::span<const JointConfig> configs);

  /// Connects every not-yet-connected pair between layers x and x + 1.
  /// Infeasible pairs become DenseReconfig edges when allow_reconfig is set.
  /// Returns the number of edges added.
  std::size_t connect_dense(std::size_t x, const KinematicChain& chain, bool allow_reconfig);

  /// As connect_dense for layers x < x2, producing sparse kinds. Requires
  /// x2 >= x + 2; throws std::invalid_argument otherwise.
  std::size_t connect_sparse(std::size_t x, std::size_t x2, const KinematicChain& chain,
                             bool allow_reconfig);

  /// Removes each sparse edge on `guide` whose endpoints are joined by a path
  /// of dense edges through the spanned layers (Dense edges only for a Sparse
  /// edge; Dense or DenseReconfig for a SparseReconfig edge).
  std::size_t supersede_sparse(const PathResult& guide);

  /// Removes the sparse edge u -> v unconditionally. Returns false if there
  /// is no such edge.
  bool retire_sparse(VertexId u, VertexId v);

  /// True if a dense-edge path leads from u to v (u.layer < v.layer).
  bool dense_reachable(VertexId u, VertexId v, bool allow_reconfig_edges) const;

  std::optional<Edge> find_edge(VertexId u, VertexId v) const;

  /// Every edge leaving u, dense first, then sparse blocks by target layer.
  std::vector<Edge> edges_from(VertexId u) const;

  const EdgeBlock* dense_block(std::size_t x) const;
  const EdgeBlock* sparse_block(std::size_t x, std::size_t x2) const;
  /// Sparse blocks leaving layer x.
  std::vector<const EdgeBlock*> sparse_blocks_from(std::size_t x) const;

  GraphSummary summary() const;
  /// Diagnostic dump as JSON text.
  std::string summary_json() const;

  /// Number of vertex pairs examined by connect calls so far.
  std::size_t pairs_checked() const { return pairs_checked_; }

 private:
  std::size_t connect(EdgeBlock& block, const KinematicChain& chain, bool allow_reconfig);
  EdgeBlock* mutable_sparse_block(std::size_t x, std::size_t x2);
  Edge make_edge(VertexId u, VertexId v, EdgeKind kind) const;

  Trajectory trajectory_;
  double merge_radius_;
  std::vector<std::vector<JointConfig>> layers_;
  std::vector<EdgeBlock> dense_;
  std::deque<EdgeBlock> sparse_;
  std::vector<std::vector<std::size_t>> sparse_out_;
  std::size_t pairs_checked_ = 0;
};

}  // namespace anytrack
