#include "anytrack/ik.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace anytrack {

namespace {

using Matrix6 = Eigen::Matrix<double, 6, 6>;

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

// Inverse right Jacobian of SO(3): maps body angular velocity to the rate of
// the rotation vector phi. Falls back to first order close to pi where the
// closed form degenerates.
Eigen::Matrix3d inverse_right_jacobian(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d k = skew(phi);
  if (theta < 1e-6) return Eigen::Matrix3d::Identity() + 0.5 * k;
  if (theta > M_PI - 1e-3) return Eigen::Matrix3d::Identity() + 0.5 * k;
  const double c = 1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Eigen::Matrix3d::Identity() + 0.5 * k + c * k * k;
}

// Norm bounds on the translation and rotation parts; each also bounds the
// individual components.
bool within_tolerances(const Vector6& e, const IkSettings& s) {
  return e.head<3>().norm() <= s.pos_tol && e.tail<3>().norm() <= s.rot_tol;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void IkSettings::validate() const {
  if (max_iters <= 0 || !(damping > 0) || !(pos_tol > 0) || !(rot_tol > 0) || !(step_clamp > 0)) {
    throw std::invalid_argument("IK settings must all be strictly positive");
  }
}

bool satisfies_target(const KinematicChain& chain, const Pose& target, const JointConfig& q,
                      const IkSettings& settings) {
  if (!chain.within_limits(q)) return false;
  const Vector6 e = pose_error(forward_kinematics(chain, q), target, chain.tolerance());
  return within_tolerances(e, settings);
}

std::optional<JointConfig> solve_ik(const KinematicChain& chain, const Pose& target,
                                    const JointConfig& seed, const IkSettings& settings,
                                    IkCounters* counters) {
  if (seed.size() != chain.dof()) throw std::invalid_argument("IK seed has wrong dimension");
  const ToleranceSpec& tol = chain.tolerance();
  const Eigen::Matrix3d rt_inv = target.orientation.toRotationMatrix().transpose();
  const double lambda2 = settings.damping * settings.damping;

  std::array<bool, 6> free_row{};
  for (int i = 0; i < 6; ++i) free_row[static_cast<std::size_t>(i)] = tol.is_free(i);

  if (counters) ++counters->solves;
  JointConfig q = chain.clamp(seed);
  for (int iter = 0; iter <= settings.max_iters; ++iter) {
    const KinematicState st = kinematic_state(chain, q);
    const Pose current = Pose::from_isometry(st.tool);
    const Vector6 raw = raw_pose_error(current, target);
    const Vector6 e = clamp_to_tolerance(raw, tol);
    if (within_tolerances(e, settings)) {
      if (counters) ++counters->successes;
      return q;
    }
    if (iter == settings.max_iters) break;
    if (counters) ++counters->iterations;

    // Jacobian of the residual, expressed in the target frame.
    Jacobian jr(6, chain.dof());
    jr.topRows<3>() = rt_inv * st.jac.topRows<3>();
    jr.bottomRows<3>() = inverse_right_jacobian(raw.tail<3>()) *
                         (st.tool.linear().transpose() * st.jac.bottomRows<3>());
    for (int i = 0; i < 6; ++i) {
      if (free_row[static_cast<std::size_t>(i)]) jr.row(i).setZero();
    }

    Matrix6 jjt = jr * jr.transpose();
    jjt.diagonal().array() += lambda2;
    const Vector6 y = jjt.ldlt().solve(-e);
    JointConfig dq = jr.transpose() * y;
    for (int j = 0; j < dq.size(); ++j) dq[j] = std::clamp(dq[j], -settings.step_clamp, settings.step_clamp);
    q = chain.clamp(q + dq);
  }
  return std::nullopt;
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t layer, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ layer) ^ index);
}

std::mt19937_64 SampleStream::next() {
  return std::mt19937_64(substream_seed(master_, layer_, next_++));
}

JointConfig uniform_config(const KinematicChain& chain, std::mt19937_64& rng) {
  JointConfig q(chain.dof());
  for (int i = 0; i < chain.dof(); ++i) {
    std::uniform_real_distribution<double> dist(chain.joint(i).pos_lower, chain.joint(i).pos_upper);
    q[i] = dist(rng);
  }
  return q;
}

std::vector<JointConfig> sample_ik_uniform(const KinematicChain& chain, const Pose& target,
                                           std::size_t count, SampleStream& stream,
                                           const SamplingOptions& options, IkCounters* counters) {
  std::vector<JointConfig> found;
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = stream.next();
    if (auto q = solve_ik(chain, target, uniform_config(chain, rng), options.ik, counters)) {
      found.push_back(*q);
    }
  }
  return merge_similar(found, options.merge_radius);
}

std::vector<JointConfig> sample_ik_targeted(const KinematicChain& chain, const Pose& target,
                                            const JointConfig& anchor, double stddev,
                                            std::size_t count, SampleStream& stream,
                                            const SamplingOptions& options, IkCounters* counters) {
  if (anchor.size() != chain.dof()) throw std::invalid_argument("anchor has wrong dimension");
  std::vector<JointConfig> found;
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = stream.next();
    JointConfig seed = anchor;
    if (stddev > 0.0) {
      std::normal_distribution<double> noise(0.0, stddev);
      for (int j = 0; j < seed.size(); ++j) seed[j] += noise(rng);
    }
    if (auto q = solve_ik(chain, target, chain.clamp(seed), options.ik, counters)) {
      found.push_back(*q);
    }
  }
  return merge_similar(found, options.merge_radius);
}

double max_abs_diff(const JointConfig& a, const JointConfig& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

std::vector<JointConfig> merge_similar(std::span<const JointConfig> configs, double radius) {
  std::vector<JointConfig> kept;
  kept.reserve(configs.size());
  for (const auto& q : configs) {
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const JointConfig& k) {
      return max_abs_diff(k, q) <= radius;
    });
    if (!duplicate) kept.push_back(q);
  }
  return kept;
}

}  // namespace anytrack
