#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anytrack/kinematics.hpp"
#include "anytrack/trajectory.hpp"

namespace test {

inline std::string robot_path(const std::string& file) {
  return std::string(ANYTRACK_DATA_DIR) + "/robots/" + file;
}

inline anytrack::KinematicChain load_robot(const std::string& file) {
  return anytrack::load_chain(robot_path(file));
}

inline const std::vector<std::string>& preset_files() {
  static const std::vector<std::string> files{"planar3r.json", "iiwa7.json", "panda.json", "panda_weld45.json"};
  return files;
}

/// Tool transform as a plain product of 4x4 homogeneous matrices built
/// straight from the DH table.
inline Eigen::Matrix4d dh_product(const anytrack::KinematicChain& chain, const anytrack::JointConfig& q) {
  auto rot_x = [](double a) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m(1, 1) = std::cos(a);
    m(1, 2) = -std::sin(a);
    m(2, 1) = std::sin(a);
    m(2, 2) = std::cos(a);
    return m;
  };
  auto rot_z = [](double a) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m(0, 0) = std::cos(a);
    m(0, 1) = -std::sin(a);
    m(1, 0) = std::sin(a);
    m(1, 1) = std::cos(a);
    return m;
  };
  auto trans = [](double x, double y, double z) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m(0, 3) = x;
    m(1, 3) = y;
    m(2, 3) = z;
    return m;
  };
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (int i = 0; i < chain.dof(); ++i) {
    const auto& j = chain.joint(i);
    t = t * rot_x(j.alpha) * trans(j.a, 0, 0) * rot_z(q[i] + j.theta_offset) * trans(0, 0, j.d);
  }
  Eigen::Matrix4d tool = Eigen::Matrix4d::Identity();
  tool.block<3, 3>(0, 0) = chain.tool().orientation.toRotationMatrix();
  tool.block<3, 1>(0, 3) = chain.tool().position;
  return t * tool;
}

inline anytrack::JointConfig random_config(const anytrack::KinematicChain& chain, std::mt19937_64& rng) {
  anytrack::JointConfig q(chain.dof());
  for (int i = 0; i < chain.dof(); ++i) {
    std::uniform_real_distribution<double> d(chain.joint(i).pos_lower, chain.joint(i).pos_upper);
    q[i] = d(rng);
  }
  return q;
}

/// Waypoints every `dt` seconds along a straight line with fixed orientation.
inline anytrack::Trajectory line_trajectory(const Eigen::Vector3d& from, const Eigen::Vector3d& to, int n,
                                            double dt, const Eigen::Quaterniond& q = Eigen::Quaterniond::Identity()) {
  std::vector<anytrack::Waypoint> wps;
  for (int i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    wps.push_back({i * dt, anytrack::Pose(from + f * (to - from), q)});
  }
  return anytrack::Trajectory(std::move(wps));
}

inline anytrack::Trajectory stationary_trajectory(const anytrack::Pose& pose, int n, double dt) {
  std::vector<anytrack::Waypoint> wps;
  for (int i = 0; i < n; ++i) wps.push_back({i * dt, pose});
  return anytrack::Trajectory(std::move(wps));
}

}  // namespace test
