#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "anytrack/kinematics.hpp"

namespace anytrack {

inline constexpr double kDefaultMergeRadius = 0.01;

struct IkSettings {
  int max_iters = 200;
  double damping = 0.1;
  double pos_tol = 1e-4;
  double rot_tol = 1e-3;
  double step_clamp = 0.2;

  /// Throws std::invalid_argument unless every field is strictly positive.
  void validate() const;
};

/// Work accounting for IK calls. Accumulates across calls.
struct IkCounters {
  std::size_t solves = 0;
  std::size_t successes = 0;
  std::size_t iterations = 0;
};

/// True when `q` lies inside the position limits and the tolerance-clamped
/// pose error has translation norm <= pos_tol and rotation norm <= rot_tol.
bool satisfies_target(const KinematicChain& chain, const Pose& target, const JointConfig& q,
                      const IkSettings& settings);

/// Damped least squares from `seed`. Returns std::nullopt when the solver does
/// not converge within settings.max_iters.
std::optional<JointConfig> solve_ik(const KinematicChain& chain, const Pose& target,
                                    const JointConfig& seed, const IkSettings& settings = {},
                                    IkCounters* counters = nullptr);

/// Deterministic source of per-sample random generators. Sample `i` of
/// layer `l` always sees the same generator for a given master seed,
/// independent of how many samples other layers drew.
class SampleStream {
 public:
  SampleStream(std::uint64_t master_seed, std::uint64_t layer, std::uint64_t first_index = 0)
      : master_(master_seed), layer_(layer), next_(first_index) {}

  std::mt19937_64 next();
  std::uint64_t next_index() const { return next_; }
  std::uint64_t layer() const { return layer_; }

 private:
  std::uint64_t master_;
  std::uint64_t layer_;
  std::uint64_t next_;
};

/// Mixes the three coordinates into one 64-bit seed (splitmix64 finalizer).
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t layer, std::uint64_t index);

JointConfig uniform_config(const KinematicChain& chain, std::mt19937_64& rng);

struct SamplingOptions {
  IkSettings ik;
  double merge_radius = kDefaultMergeRadius;
};

/// Solves from `count` seeds drawn uniformly within the position limits and
/// returns the de-duplicated successes.
std::vector<JointConfig> sample_ik_uniform(const KinematicChain& chain, const Pose& target,
                                           std::size_t count, SampleStream& stream,
                                           const SamplingOptions& options = {},
                                           IkCounters* counters = nullptr);

/// Solves from `count` seeds drawn as anchor + N(0, stddev^2) per joint,
/// clamped to limits, and returns the de-duplicated successes.
std::vector<JointConfig> sample_ik_targeted(const KinematicChain& chain, const Pose& target,
                                            const JointConfig& anchor, double stddev,
                                            std::size_t count, SampleStream& stream,
                                            const SamplingOptions& options = {},
                                            IkCounters* counters = nullptr);

/// Greedy single-pass clustering: keeps a config unless it lies within
/// `radius` (infinity norm) of an already kept one. Preserves input order.
std::vector<JointConfig> merge_similar(std::span<const JointConfig> configs, double radius);

double max_abs_diff(const JointConfig& a, const JointConfig& b);

}  // namespace anytrack
