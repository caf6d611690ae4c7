#pragma once

#include <cmath>
#include <initializer_list>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace anytrack {

/// Upper bound on chain length; lets joint vectors live on the stack.
inline constexpr int kMaxDof = 12;

using JointConfig = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDof, 1>;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic, 0, 6, kMaxDof>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Rigid tool pose. The quaternion is kept unit-norm with w >= 0.
struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Pose() = default;
  Pose(const Eigen::Vector3d& p, const Eigen::Quaterniond& q);

  static Pose from_isometry(const Eigen::Isometry3d& iso);
  Eigen::Isometry3d to_isometry() const;
};

/// Returns q normalized and flipped into the w >= 0 hemisphere.
Eigen::Quaterniond canonicalize(const Eigen::Quaterniond& q);

/// Rotation vector (axis * angle) of q, angle in [0, pi].
Eigen::Vector3d quaternion_log(const Eigen::Quaterniond& q);
Eigen::Quaterniond quaternion_exp(const Eigen::Vector3d& rotation_vector);

/// Per-axis allowed deviation of the tool frame, expressed in the target
/// frame. Axis order: tx, ty, tz, rx, ry, rz.
struct ToleranceSpec {
  Vector6 lower = Vector6::Zero();
  Vector6 upper = Vector6::Zero();

  static ToleranceSpec exact() { return {}; }
  static ToleranceSpec free_axes(std::initializer_list<int> axes);

  bool is_free(int axis) const;
  void validate() const;
};

/// One revolute joint in modified (Craig) DH form: the frame of joint i is
/// reached by RotX(alpha) * TransX(a) * RotZ(theta + theta_offset) * TransZ(d).
struct ChainJoint {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
  double pos_lower = -M_PI;
  double pos_upper = M_PI;
  double vel_max = 1.0;
};

class KinematicChain {
 public:
  /// Throws std::invalid_argument when an invariant is violated.
  KinematicChain(std::string name, std::vector<ChainJoint> joints, Pose tool = {},
                 ToleranceSpec tolerance = ToleranceSpec::exact());

  const std::string& name() const { return name_; }
  int dof() const { return static_cast<int>(joints_.size()); }
  const std::vector<ChainJoint>& joints() const { return joints_; }
  const ChainJoint& joint(int i) const { return joints_[static_cast<std::size_t>(i)]; }
  const Pose& tool() const { return tool_; }
  const Eigen::Isometry3d& tool_isometry() const { return tool_iso_; }
  const ToleranceSpec& tolerance() const { return tolerance_; }

  JointConfig lower_limits() const;
  JointConfig upper_limits() const;
  JointConfig mid_config() const;

  /// Clamps each angle into its position limits.
  JointConfig clamp(const JointConfig& q) const;
  bool within_limits(const JointConfig& q) const;

  KinematicChain with_tolerance(ToleranceSpec tolerance) const;

 private:
  std::string name_;
  std::vector<ChainJoint> joints_;
  Pose tool_;
  Eigen::Isometry3d tool_iso_;
  ToleranceSpec tolerance_;
};

/// Tool-frame pose under the product of joint transforms and the tool
/// transform. Throws std::invalid_argument on a dimension mismatch.
Pose forward_kinematics(const KinematicChain& chain, const JointConfig& q);

/// Geometric Jacobian in the base frame: rows 0-2 linear, 3-5 angular
/// velocity of the tool frame.
Jacobian jacobian(const KinematicChain& chain, const JointConfig& q);

/// Tool pose together with the geometric Jacobian, sharing one pass over
/// the chain.
struct KinematicState {
  Eigen::Isometry3d tool;
  Jacobian jac;
};
KinematicState kinematic_state(const KinematicChain& chain, const JointConfig& q);

/// Unclamped deviation of `current` from `target`: translation and rotation
/// vector of the relative rotation, both expressed in the target frame.
Vector6 raw_pose_error(const Pose& current, const Pose& target);

/// Applies tolerance bounds component-wise: 0 inside [lower, upper], the
/// signed overshoot past the nearer bound outside.
Vector6 clamp_to_tolerance(const Vector6& raw, const ToleranceSpec& tol);

Vector6 pose_error(const Pose& current, const Pose& target, const ToleranceSpec& tol);

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a robot-definition JSON file. Throws LoadError.
KinematicChain load_chain(const std::filesystem::path& path);
KinematicChain parse_chain(const std::string& json_text);

}  // namespace anytrack
