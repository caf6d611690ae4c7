#pragma once

#include <optional>

#include "anytrack/graph.hpp"
#include "anytrack/path.hpp"

namespace anytrack {

enum class EdgeFilter : std::uint8_t { DenseOnly, DenseAndSparse };

struct SearchResult {
  std::optional<PathResult> path;
  /// Highest layer holding a reached vertex; num_layers - 1 on success.
  std::size_t furthest_layer = 0;
  /// Edge relaxations performed, for work accounting.
  std::size_t relaxations = 0;

  explicit operator bool() const { return path.has_value(); }
};

/// Exact optimum from any first-layer vertex to any last-layer vertex by
/// forward dynamic programming in layer order. Reconfiguration edges are
/// admitted only under Metric::LexReconfigMovement. Among equal-cost
/// predecessors the smallest (layer, slot) wins; among equal-cost endpoints
/// the smallest slot.
SearchResult shortest_path(const LayeredGraph& graph, Metric metric, EdgeFilter filter);

/// Cost of an explicit vertex sequence, recomputed from the graph's edges.
/// Returns std::nullopt if a consecutive pair is not an edge admitted by the
/// metric.
std::optional<Cost> path_cost(const LayeredGraph& graph, Metric metric,
                              std::span<const VertexId> vertices);

}  // namespace anytrack
