#include "anytrack/frameworks.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace anytrack {

void FrameworkConfig::validate() const {
  if (m < 1 || delta_m < 1 || m0 < 1 || md < 1 || s < 1) {
    throw std::invalid_argument("m, delta_m, m0, md and s must all be >= 1");
  }
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (!(eta >= 1.0)) throw std::invalid_argument("eta must be >= 1");
  if (!budget.seconds && !budget.iterations) throw std::invalid_argument("budget needs seconds or iterations");
  if (budget.seconds && !(*budget.seconds > 0.0)) throw std::invalid_argument("budget seconds must be positive");
  if (budget.iterations && *budget.iterations < 1) throw std::invalid_argument("budget iterations must be >= 1");
  sampling.ik.validate();
}

std::optional<double> AnytimeTrace::time_to_first_solution() const {
  if (records.empty()) return std::nullopt;
  return records.front().elapsed;
}

std::optional<Cost> AnytimeTrace::final_cost() const {
  if (records.empty()) return std::nullopt;
  return records.back().cost;
}

std::optional<Cost> AnytimeTrace::cost_at(double seconds) const {
  std::optional<Cost> best;
  for (const auto& r : records) {
    if (r.elapsed > seconds) break;
    best = r.cost;
  }
  return best;
}

std::vector<std::size_t> sparse_layers(std::size_t num_layers, std::size_t s) {
  if (s < 1) throw std::invalid_argument("sparse step must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < num_layers; x += s) out.push_back(x);
  if (num_layers > 0 && out.back() != num_layers - 1) out.push_back(num_layers - 1);
  return out;
}

std::size_t per_layer_budget(std::size_t md, double eta, std::size_t iteration) {
  if (iteration < 1) throw std::invalid_argument("iterations are counted from 1");
  const double c = static_cast<double>(md) * std::pow(eta, static_cast<double>(iteration - 1));
  // Guard against pow rounding a whole number up by one ulp.
  return static_cast<std::size_t>(std::ceil(c - 1e-9));
}

namespace {

using SteadyClock = std::chrono::steady_clock;

constexpr std::uint64_t kCorridorTag = 0x636f7272ULL;

// Uniform sampling streams are keyed by the waypoint pose, so identical
// waypoints draw identical seeds and distinct ones draw independent seeds.
std::uint64_t pose_key(const Pose& p) {
  const std::array<double, 7> v{p.position.x(),    p.position.y(),    p.position.z(),   p.orientation.w(),
                                p.orientation.x(), p.orientation.y(), p.orientation.z()};
  std::uint64_t key = 0x706f7365ULL;
  for (double d : v) key = substream_seed(key, std::bit_cast<std::uint64_t>(d), 0);
  return key;
}

std::uint64_t corridor_key(std::size_t iteration, std::size_t first_layer) {
  return (static_cast<std::uint64_t>(iteration) << 32) ^ static_cast<std::uint64_t>(first_layer);
}

// Shared state of one framework run.
class Run {
 public:
  Run(const KinematicChain& chain, const Trajectory& traj, const FrameworkConfig& cfg)
      : chain_(chain),
        cfg_(cfg),
        result_{std::nullopt, {}, {}, LayeredGraph(traj, cfg.sampling.merge_radius), 0},
        next_index_(traj.size(), 0),
        start_(SteadyClock::now()) {
    cfg.validate();
    auto& st = result_.stats;
    st.uniform_seeds.assign(traj.size(), 0);
    st.targeted_seeds.assign(traj.size(), 0);
    for (const auto& w : traj.waypoints()) uniform_keys_.push_back(pose_key(w.pose));
  }

  LayeredGraph& graph() { return result_.graph; }
  RunStats& stats() { return result_.stats; }
  const FrameworkConfig& cfg() const { return cfg_; }
  const KinematicChain& chain() const { return chain_; }
  const Pose& target(std::size_t x) const { return result_.graph.trajectory()[x].pose; }
  std::size_t layers() const { return result_.graph.num_layers(); }

  double elapsed() const {
    if (cfg_.clock == ClockMode::Work) {
      const auto& r = cfg_.work_rates;
      const auto& ik = result_.stats.ik;
      return r.ik_iteration * static_cast<double>(ik.iterations) + r.ik_solve * static_cast<double>(ik.solves) +
             r.pair_check * static_cast<double>(result_.graph.pairs_checked()) +
             r.relaxation * static_cast<double>(relaxations_);
    }
    return std::chrono::duration<double>(SteadyClock::now() - start_).count();
  }

  std::vector<VertexId> add_uniform(std::size_t x, std::size_t count) {
    SampleStream stream(cfg_.seed, uniform_keys_[x], next_index_[x]);
    auto configs = sample_ik_uniform(chain_, target(x), count, stream, cfg_.sampling, &result_.stats.ik);
    next_index_[x] = stream.next_index();
    result_.stats.uniform_seeds[x] += count;
    return result_.graph.add_vertices(x, configs);
  }

  /// Targeted samples at layer x. Seeds share their noise with every other
  /// layer sampled under the same `corridor` key, so sample k across a
  /// corridor is one perturbed copy of the guide segment.
  std::vector<VertexId> add_targeted(std::size_t x, const JointConfig& anchor, std::size_t count,
                                     std::uint64_t corridor) {
    SampleStream stream(substream_seed(cfg_.seed, kCorridorTag, corridor), 0);
    auto configs = sample_ik_targeted(chain_, target(x), anchor, cfg_.delta, count, stream, cfg_.sampling,
                                      &result_.stats.ik);
    result_.stats.targeted_seeds[x] += count;
    return result_.graph.add_vertices(x, configs);
  }

  /// One IK solve from a given seed (greedy chaining). Counted as targeted.
  std::optional<JointConfig> solve_from(std::size_t x, const JointConfig& seed) {
    ++result_.stats.targeted_seeds[x];
    return solve_ik(chain_, target(x), seed, cfg_.sampling.ik, &result_.stats.ik);
  }

  std::optional<JointConfig> solve_from_uniform_seed(std::size_t x) {
    SampleStream stream(cfg_.seed, uniform_keys_[x], next_index_[x]);
    auto rng = stream.next();
    next_index_[x] = stream.next_index();
    ++result_.stats.uniform_seeds[x];
    return solve_ik(chain_, target(x), uniform_config(chain_, rng), cfg_.sampling.ik, &result_.stats.ik);
  }

  SearchResult search(EdgeFilter filter) {
    SearchResult r = shortest_path(result_.graph, cfg_.metric, filter);
    relaxations_ += r.relaxations;
    return r;
  }

  /// Appends a trace record for a dense-only optimum.
  void record(std::size_t iteration, const SearchResult& found) {
    result_.furthest_layer = found.furthest_layer;
    if (!found.path) return;
    auto& recs = result_.trace.records;
    double t = elapsed();
    if (!recs.empty()) {
      if (recs.back().cost < found.path->cost) {
        throw std::logic_error("anytime cost increased; graph growth must be monotone");
      }
      t = std::max(t, std::nextafter(recs.back().elapsed, INFINITY));
    }
    recs.push_back({iteration, t, found.path->cost});
    result_.solution = found.path;
  }

  void end_iteration(std::size_t iteration) {
    result_.stats.iterations = iteration;
    result_.stats.uniform_seeds_by_iteration.push_back(result_.stats.uniform_seeds);
  }

  bool budget_left(std::size_t iterations_done) const {
    const auto& b = cfg_.budget;
    if (b.iterations && iterations_done >= *b.iterations) return false;
    if (b.seconds && iterations_done > 0 && elapsed() >= *b.seconds) return false;
    return true;
  }

  void connect_all_dense() {
    for (std::size_t x = 0; x + 1 < layers(); ++x) graph().connect_dense(x, chain_, cfg_.allow_reconfig);
  }

  RunResult finish() {
    result_.stats.elapsed = elapsed();
    return std::move(result_);
  }

 private:
  const KinematicChain& chain_;
  const FrameworkConfig& cfg_;
  RunResult result_;
  std::vector<std::uint64_t> next_index_;
  std::vector<std::uint64_t> uniform_keys_;
  std::size_t relaxations_ = 0;
  SteadyClock::time_point start_;
};

}  // namespace

RunResult run_conventional(const KinematicChain& chain, const Trajectory& traj, const FrameworkConfig& cfg) {
  Run run(chain, traj, cfg);
  for (std::size_t x = 0; x < run.layers(); ++x) run.add_uniform(x, cfg.m);
  run.connect_all_dense();
  run.record(1, run.search(EdgeFilter::DenseOnly));
  run.end_iteration(1);
  return run.finish();
}

RunResult run_naive_anytime(const KinematicChain& chain, const Trajectory& traj, const FrameworkConfig& cfg) {
  Run run(chain, traj, cfg);
  std::size_t iteration = 0;
  while (run.budget_left(iteration)) {
    ++iteration;
    if (iteration == 1) {
      // Greedy chain: each layer solved from the previous layer's greedy
      // solution; restarts from a uniform seed where the chain breaks.
      std::optional<JointConfig> prev;
      for (std::size_t x = 0; x < run.layers(); ++x) {
        std::optional<JointConfig> greedy;
        if (prev) greedy = run.solve_from(x, *prev);
        if (!greedy) greedy = run.solve_from_uniform_seed(x);
        if (greedy) run.graph().add_vertices(x, std::span<const JointConfig>(&*greedy, 1));
        prev = greedy;
        if (cfg.delta_m > 1) run.add_uniform(x, cfg.delta_m - 1);
      }
    } else {
      for (std::size_t x = 0; x < run.layers(); ++x) run.add_uniform(x, cfg.delta_m);
    }
    run.connect_all_dense();
    run.record(iteration, run.search(EdgeFilter::DenseOnly));
    run.end_iteration(iteration);
  }
  return run.finish();
}

namespace {

// Connects consecutive sparse layers; a one-layer gap is a dense pair.
void connect_sparse_layers(Run& run, const std::vector<std::size_t>& sparse) {
  for (std::size_t i = 0; i + 1 < sparse.size(); ++i) {
    const std::size_t a = sparse[i], b = sparse[i + 1];
    if (b - a >= 2) {
      run.graph().connect_sparse(a, b, run.chain(), run.cfg().allow_reconfig);
    } else {
      run.graph().connect_dense(a, run.chain(), run.cfg().allow_reconfig);
    }
  }
}

// Retires guide sparse edges that densification failed to supersede
// `limit` times; the dense path they promise may not exist at all.
std::size_t retire_stale(LayeredGraph& graph, const PathResult& guide,
                         std::map<std::pair<VertexId, VertexId>, std::size_t>& attempts, std::size_t limit) {
  std::size_t retired = 0;
  for (std::size_t e = 0; e < guide.edges.size(); ++e) {
    if (!is_sparse(guide.edges[e])) continue;
    const VertexId u = guide.vertices[e], v = guide.vertices[e + 1];
    const auto kind = graph.find_edge(u, v);
    if (!kind || !is_sparse(kind->kind)) continue;
    if (++attempts[{u, v}] >= limit && graph.retire_sparse(u, v)) ++retired;
  }
  return retired;
}

}  // namespace

RunResult run_guided_anytime(const KinematicChain& chain, const Trajectory& traj, const FrameworkConfig& cfg) {
  Run run(chain, traj, cfg);
  const std::size_t n = run.layers();
  const auto sparse = sparse_layers(n, cfg.s);
  std::vector<char> is_sparse_layer(n, 0);
  for (auto x : sparse) is_sparse_layer[x] = 1;

  std::map<std::pair<VertexId, VertexId>, std::size_t> attempts;
  std::size_t iteration = 0;
  while (run.budget_left(iteration)) {
    ++iteration;
    const std::size_t count = per_layer_budget(cfg.md, cfg.eta, iteration);
    GuidedIterationStats it_stats;
    it_stats.iteration = iteration;
    it_stats.per_layer_count = count;

    // Stage 1: sparse vertex sampling.
    if (iteration == 1) {
      for (auto x : sparse) run.add_uniform(x, cfg.m0);
      run.stats().sparse_stage_seeds = cfg.m0 * sparse.size();
    } else if (cfg.grow_sparse) {
      for (auto x : sparse) run.add_uniform(x, count);
    }

    // Stage 2: sparse edge addition.
    connect_sparse_layers(run, sparse);

    // Stage 3: guide path search over dense and sparse edges.
    const SearchResult guide = run.search(EdgeFilter::DenseAndSparse);

    // Stage 4: additional vertex sampling.
    std::vector<char> touched(n, 0);
    if (iteration > 1 && cfg.grow_sparse) {
      for (auto x : sparse) touched[x] = 1;
    }
    if (guide.path) {
      const PathResult& g = *guide.path;
      it_stats.guide_cost = g.cost;
      it_stats.guide_sparse_edges = g.sparse_edge_count();
      if (it_stats.guide_sparse_edges > 0) {
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
          if (!is_sparse(g.edges[e])) continue;
          const VertexId u = g.vertices[e], v = g.vertices[e + 1];
          const JointConfig& qu = run.graph().config(u);
          const JointConfig& qv = run.graph().config(v);
          const double span = static_cast<double>(v.layer - u.layer);
          for (std::size_t j = u.layer + 1; j < v.layer; ++j) {
            const double f = static_cast<double>(j - u.layer) / span;
            const JointConfig anchor = qu + f * (qv - qu);
            run.add_targeted(j, anchor, count, corridor_key(iteration, u.layer));
            run.add_uniform(j, count);
            touched[j] = 1;
          }
        }
      } else {
        // The guide is already a solution: refine around it everywhere.
        for (std::size_t j = 0; j < n; ++j) {
          run.add_targeted(j, run.graph().config(g.vertices[j]), count, corridor_key(iteration, n));
          run.add_uniform(j, count);
          touched[j] = 1;
        }
      }
    } else {
      // No guide yet: the sparse skeleton is disconnected past the furthest
      // reached layer. Resample that stretch uniformly.
      const std::size_t from = guide.furthest_layer;
      for (std::size_t j = from; j < n; ++j) {
        run.add_uniform(j, is_sparse_layer[j] ? cfg.m0 : count);
        touched[j] = 1;
      }
    }

    // Stage 5: dense edge addition and superseding.
    for (std::size_t j = 0; j < n; ++j) {
      if (!touched[j]) continue;
      it_stats.touched_layers.push_back(j);
      if (j > 0) run.graph().connect_dense(j - 1, chain, cfg.allow_reconfig);
      if (j + 1 < n) run.graph().connect_dense(j, chain, cfg.allow_reconfig);
    }
    if (guide.path) {
      it_stats.superseded = run.graph().supersede_sparse(*guide.path);
      if (cfg.retire_after > 0) it_stats.retired = retire_stale(run.graph(), *guide.path, attempts, cfg.retire_after);
    }

    // Stage 6: solution search over dense edges only.
    run.record(iteration, run.search(EdgeFilter::DenseOnly));
    run.stats().guided.push_back(std::move(it_stats));
    run.end_iteration(iteration);
  }
  return run.finish();
}

const char* to_string(FrameworkKind k) {
  switch (k) {
    case FrameworkKind::Conventional: return "conventional";
    case FrameworkKind::Naive: return "naive";
    case FrameworkKind::Guided: return "guided";
  }
  return "unknown";
}

std::optional<FrameworkKind> parse_framework(const std::string& name) {
  if (name == "conventional") return FrameworkKind::Conventional;
  if (name == "naive") return FrameworkKind::Naive;
  if (name == "guided") return FrameworkKind::Guided;
  return std::nullopt;
}

const char* to_string(Metric m) {
  switch (m) {
    case Metric::MovementOnly: return "movement";
    case Metric::MaxJointDelta: return "maxdelta";
    case Metric::LexReconfigMovement: return "lex";
  }
  return "unknown";
}

std::optional<Metric> parse_metric(const std::string& name) {
  if (name == "movement") return Metric::MovementOnly;
  if (name == "maxdelta") return Metric::MaxJointDelta;
  if (name == "lex") return Metric::LexReconfigMovement;
  return std::nullopt;
}

RunResult run_framework(FrameworkKind kind, const KinematicChain& chain, const Trajectory& traj,
                        const FrameworkConfig& cfg) {
  switch (kind) {
    case FrameworkKind::Conventional: return run_conventional(chain, traj, cfg);
    case FrameworkKind::Naive: return run_naive_anytime(chain, traj, cfg);
    case FrameworkKind::Guided: return run_guided_anytime(chain, traj, cfg);
  }
  throw std::invalid_argument("unknown framework");
}

}  // namespace anytrack
