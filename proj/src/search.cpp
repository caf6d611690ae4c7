#include "anytrack/search.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace anytrack {

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Dense: return "dense";
    case EdgeKind::Sparse: return "sparse";
    case EdgeKind::DenseReconfig: return "dense_reconfig";
    case EdgeKind::SparseReconfig: return "sparse_reconfig";
  }
  return "unknown";
}

std::ostream& operator<<(std::ostream& os, const Cost& c) {
  return os << '(' << c.reconfigs << ", " << c.movement << ')';
}

Cost fold_cost(Metric metric, std::span<const EdgeCost> edges) {
  Cost c;
  for (const auto& e : edges) c = extend_cost(metric, c, e);
  return c;
}

std::size_t PathResult::sparse_edge_count() const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), is_sparse));
}

std::size_t PathResult::reconfig_edge_count() const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), is_reconfig));
}

namespace {

struct Label {
  Cost cost;
  VertexId pred;
  EdgeKind via = EdgeKind::Dense;
  bool reached = false;
};

class Relaxer {
 public:
  Relaxer(const LayeredGraph& g, Metric metric) : g_(g), metric_(metric) {
    labels_.resize(g.num_layers());
    for (std::size_t x = 0; x < g.num_layers(); ++x) labels_[x].resize(g.layer(x).size());
  }

  std::vector<std::vector<Label>>& labels() { return labels_; }
  std::size_t relaxations() const { return relaxations_; }

  void relax_block(const EdgeBlock& block) {
    const std::uint32_t x = block.from_layer();
    const std::uint32_t y = block.to_layer();
    const EdgeKind feasible_kind = block.sparse() ? EdgeKind::Sparse : EdgeKind::Dense;
    const EdgeKind reconfig_kind = block.sparse() ? EdgeKind::SparseReconfig : EdgeKind::DenseReconfig;
    const bool with_reconfig = admits_reconfig(metric_) && block.reconfig_rows() > 0;
    auto& from = labels_[x];
    auto& to = labels_[y];
    const std::size_t rows = std::min(block.rows(), from.size());

    for (std::uint32_t a = 0; a < rows; ++a) {
      if (!from[a].reached) continue;
      const JointConfig& qa = g_.layer(x)[a];
      for (std::uint32_t b : block.feasible_from(a)) {
        if (block.is_removed(a, b)) continue;
        offer(to[b], from[a].cost, {x, a}, feasible_kind, joint_distance(qa, g_.layer(y)[b]), false);
      }
      if (!with_reconfig || a >= block.reconfig_rows()) continue;
      const auto feasible = block.feasible_from(a);
      auto it = feasible.begin();
      for (std::uint32_t b = 0; b < block.reconfig_cols(); ++b) {
        while (it != feasible.end() && *it < b) ++it;
        if (it != feasible.end() && *it == b) continue;
        // A reconfiguration can only win if it does not exceed the current
        // reconfiguration count at b.
        if (to[b].reached && from[a].cost.reconfigs + 1 > to[b].cost.reconfigs) continue;
        if (block.is_removed(a, b)) continue;
        offer(to[b], from[a].cost, {x, a}, reconfig_kind, joint_distance(qa, g_.layer(y)[b]), true);
      }
    }
  }

 private:
  void offer(Label& target, const Cost& base, VertexId pred, EdgeKind kind, double movement,
             bool reconfig) {
    ++relaxations_;
    const Cost c = extend_cost(metric_, base, {movement, reconfig});
    if (!target.reached || c < target.cost) {
      target.cost = c;
      target.pred = pred;
      target.via = kind;
      target.reached = true;
    }
  }

  const LayeredGraph& g_;
  Metric metric_;
  std::vector<std::vector<Label>> labels_;
  std::size_t relaxations_ = 0;
};

}  // namespace

SearchResult shortest_path(const LayeredGraph& graph, Metric metric, EdgeFilter filter) {
  const std::size_t n = graph.num_layers();
  if (n < 2) throw std::invalid_argument("shortest_path needs at least two layers");
  Relaxer relaxer(graph, metric);
  auto& labels = relaxer.labels();
  for (auto& l : labels[0]) l.reached = true;

  SearchResult result;
  for (std::size_t x = 0; x + 1 < n; ++x) {
    const bool any = std::any_of(labels[x].begin(), labels[x].end(), [](const Label& l) { return l.reached; });
    if (!any) continue;
    result.furthest_layer = x;
    // Blocks are relaxed in ascending target layer so that, within a layer
    // sweep, predecessors are offered in (layer, slot) order.
    relaxer.relax_block(*graph.dense_block(x));
    if (filter == EdgeFilter::DenseAndSparse) {
      for (const EdgeBlock* block : graph.sparse_blocks_from(x)) relaxer.relax_block(*block);
    }
  }
  result.relaxations = relaxer.relaxations();

  const auto& last = labels[n - 1];
  std::optional<std::uint32_t> best;
  for (std::uint32_t b = 0; b < last.size(); ++b) {
    if (last[b].reached && (!best || last[b].cost < last[*best].cost)) best = b;
  }
  if (!best) return result;
  result.furthest_layer = n - 1;

  PathResult path;
  path.cost = last[*best].cost;
  VertexId v{static_cast<std::uint32_t>(n - 1), *best};
  path.vertices.push_back(v);
  while (v.layer > 0) {
    const Label& l = labels[v.layer][v.slot];
    path.edges.push_back(l.via);
    v = l.pred;
    path.vertices.push_back(v);
  }
  std::reverse(path.vertices.begin(), path.vertices.end());
  std::reverse(path.edges.begin(), path.edges.end());
  path.is_solution = std::none_of(path.edges.begin(), path.edges.end(), is_sparse);
  result.path = std::move(path);
  return result;
}

std::optional<Cost> path_cost(const LayeredGraph& graph, Metric metric, std::span<const VertexId> vertices) {
  Cost c;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    const auto e = graph.find_edge(vertices[i], vertices[i + 1]);
    if (!e) return std::nullopt;
    if (is_reconfig(e->kind) && !admits_reconfig(metric)) return std::nullopt;
    c = extend_cost(metric, c, {e->movement, is_reconfig(e->kind)});
  }
  return c;
}

}  // namespace anytrack
