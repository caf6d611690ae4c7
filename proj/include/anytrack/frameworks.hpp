#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anytrack/graph.hpp"
#include "anytrack/ik.hpp"
#include "anytrack/search.hpp"
#include "anytrack/trajectory.hpp"

namespace anytrack {

/// How elapsed time is measured. `Work` derives time from counted solver
/// iterations, pair checks and search relaxations, which makes traces and
/// time budgets reproducible bit for bit.
enum class ClockMode : std::uint8_t { Wall, Work };

/// Nominal seconds charged per unit of counted work under ClockMode::Work.
struct WorkRates {
  double ik_iteration = 2.0e-6;
  double ik_solve = 1.0e-6;
  double pair_check = 2.0e-8;
  double relaxation = 2.0e-8;
};

struct Budget {
  std::optional<double> seconds;
  std::optional<std::size_t> iterations;
};

struct FrameworkConfig {
  Metric metric = Metric::MovementOnly;
  bool allow_reconfig = false;
  /// Conventional: samples per waypoint.
  std::size_t m = 250;
  /// Naive anytime: samples per waypoint per iteration.
  std::size_t delta_m = 25;
  /// Guided: stage-1 samples per sparse layer.
  std::size_t m0 = 50;
  /// Guided: base per-layer targeted count, grown by eta each iteration.
  std::size_t md = 5;
  /// Guided: after the first iteration, each sparse layer also receives the
  /// iteration's per-layer count of uniform samples.
  bool grow_sparse = true;
  /// Guided: sparse step in layers.
  std::size_t s = 5;
  /// Guided: targeted-sampling standard deviation, radians.
  double delta = 0.2;
  double eta = 1.1;
  /// Guided: a sparse edge that stays on the guide path this many iterations
  /// without being superseded is retired. 0 keeps such edges forever.
  std::size_t retire_after = 3;
  Budget budget{std::nullopt, std::size_t{20}};
  std::uint64_t seed = 1;

  SamplingOptions sampling;
  ClockMode clock = ClockMode::Wall;
  WorkRates work_rates;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct TraceRecord {
  std::size_t iteration = 0;
  double elapsed = 0.0;
  Cost cost;
};

/// Quality-vs-time curve. Elapsed strictly increases, cost never increases.
struct AnytimeTrace {
  std::vector<TraceRecord> records;

  bool empty() const { return records.empty(); }
  std::optional<double> time_to_first_solution() const;
  std::optional<Cost> final_cost() const;
  /// Best cost reached no later than `seconds`.
  std::optional<Cost> cost_at(double seconds) const;
};

/// Per-iteration bookkeeping of the guided framework's sampling stages.
struct GuidedIterationStats {
  std::size_t iteration = 0;
  std::size_t per_layer_count = 0;
  /// Cost of the guide path (dense and sparse edges), if one was found.
  std::optional<Cost> guide_cost;
  std::size_t guide_sparse_edges = 0;
  std::size_t superseded = 0;
  std::size_t retired = 0;
  std::vector<std::size_t> touched_layers;
};

struct RunStats {
  /// Seeds drawn for uniform / targeted sampling, per layer, cumulative.
  std::vector<std::size_t> uniform_seeds;
  std::vector<std::size_t> targeted_seeds;
  /// uniform_seeds snapshot after each iteration.
  std::vector<std::vector<std::size_t>> uniform_seeds_by_iteration;
  std::vector<GuidedIterationStats> guided;
  std::size_t sparse_stage_seeds = 0;
  std::size_t iterations = 0;
  IkCounters ik;
  double elapsed = 0.0;
};

struct RunResult {
  std::optional<PathResult> solution;
  AnytimeTrace trace;
  RunStats stats;
  LayeredGraph graph;
  /// Furthest layer the last search reached.
  std::size_t furthest_layer = 0;

  bool solved() const { return solution.has_value(); }
};

/// Layers {0, s, 2s, ...} plus the final layer.
std::vector<std::size_t> sparse_layers(std::size_t num_layers, std::size_t s);

/// ceil(md * eta^(iteration - 1)) for iteration >= 1.
std::size_t per_layer_budget(std::size_t md, double eta, std::size_t iteration);

/// Uniform sampling of m configs per waypoint, dense connection and one search.
RunResult run_conventional(const KinematicChain& chain, const Trajectory& traj, const FrameworkConfig& cfg);

/// Greedy chain plus uniform samples, refined by adding delta_m uniform samples
/// per waypoint each iteration.
RunResult run_naive_anytime(const KinematicChain& chain, const Trajectory& traj, const FrameworkConfig& cfg);

/// Sparse sampling, guide-path search and guide-biased densification.
RunResult run_guided_anytime(const KinematicChain& chain, const Trajectory& traj, const FrameworkConfig& cfg);

enum class FrameworkKind : std::uint8_t { Conventional, Naive, Guided };

const char* to_string(FrameworkKind k);
std::optional<FrameworkKind> parse_framework(const std::string& name);
const char* to_string(Metric m);
std::optional<Metric> parse_metric(const std::string& name);

RunResult run_framework(FrameworkKind kind, const KinematicChain& chain, const Trajectory& traj,
                        const FrameworkConfig& cfg);

}  // namespace anytrack
