#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

namespace anytrack {

/// Vertex V[layer][slot] of the layered graph.
struct VertexId {
  std::uint32_t layer = 0;
  std::uint32_t slot = 0;

  friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

enum class EdgeKind : std::uint8_t { Dense, Sparse, DenseReconfig, SparseReconfig };

inline bool is_reconfig(EdgeKind k) {
  return k == EdgeKind::DenseReconfig || k == EdgeKind::SparseReconfig;
}
inline bool is_sparse(EdgeKind k) { return k == EdgeKind::Sparse || k == EdgeKind::SparseReconfig; }
const char* to_string(EdgeKind k);

/// Lexicographic (reconfigurations, joint movement) cost.
struct Cost {
  std::uint32_t reconfigs = 0;
  double movement = 0.0;

  friend bool operator==(const Cost&, const Cost&) = default;
  friend bool operator<(const Cost& a, const Cost& b) {
    return a.reconfigs < b.reconfigs || (a.reconfigs == b.reconfigs && a.movement < b.movement);
  }
  friend bool operator<=(const Cost& a, const Cost& b) { return !(b < a); }
  friend bool operator>(const Cost& a, const Cost& b) { return b < a; }
};

std::ostream& operator<<(std::ostream& os, const Cost& c);

enum class Metric : std::uint8_t { MovementOnly, MaxJointDelta, LexReconfigMovement };

/// Reconfiguration edges only participate under the lexicographic metric.
inline bool admits_reconfig(Metric m) { return m == Metric::LexReconfigMovement; }

/// Cost contribution of a single edge.
struct EdgeCost {
  double movement = 0.0;
  bool reconfig = false;
};

/// Extends `acc` by one edge under `metric`.
inline Cost extend_cost(Metric metric, const Cost& acc, const EdgeCost& e) {
  Cost out = acc;
  if (metric == Metric::MaxJointDelta) {
    out.movement = acc.movement > e.movement ? acc.movement : e.movement;
  } else {
    out.movement = acc.movement + e.movement;
  }
  if (e.reconfig) ++out.reconfigs;
  return out;
}

/// Folds edge costs left to right: sums movement (max for MaxJointDelta) and
/// counts reconfiguration edges.
Cost fold_cost(Metric metric, std::span<const EdgeCost> edges);

/// A guide path or a solution through the layered graph.
struct PathResult {
  std::vector<VertexId> vertices;
  /// Kind of the edge between vertices[i] and vertices[i + 1].
  std::vector<EdgeKind> edges;
  Cost cost;
  /// True iff every edge spans exactly one layer.
  bool is_solution = false;

  std::size_t sparse_edge_count() const;
  std::size_t reconfig_edge_count() const;
};

}  // namespace anytrack
