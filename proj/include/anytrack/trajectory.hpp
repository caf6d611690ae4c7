#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "anytrack/kinematics.hpp"

namespace anytrack {

struct Waypoint {
  double t = 0.0;
  Pose pose;
};

/// Maximum spacing between consecutive waypoints the planners assume.
inline constexpr double kMaxWaypointStepPosition = 0.05;
inline constexpr double kMaxWaypointStepRotation = 0.1;

/// Timestamped reference trajectory for the tool frame.
///
/// Construction enforces at least two waypoints, finite non-negative and
/// strictly increasing timestamps, and unit quaternions. Waypoint density is
/// reported by `is_dense()` rather than enforced, so short hand-built
/// trajectories remain expressible.
class Trajectory {
 public:
  explicit Trajectory(std::vector<Waypoint> waypoints);

  std::size_t size() const { return waypoints_.size(); }
  const Waypoint& operator[](std::size_t i) const { return waypoints_[i]; }
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  double duration() const { return waypoints_.back().t - waypoints_.front().t; }

  bool is_dense(double max_step_position = kMaxWaypointStepPosition,
                double max_step_rotation = kMaxWaypointStepRotation) const;

 private:
  std::vector<Waypoint> waypoints_;
};

double rotation_angle_between(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

struct PathStats {
  double length = 0.0;
  double angular_displacement = 0.0;
};

PathStats path_stats(const Trajectory& traj);

/// Parameters of the random cumulative-Bezier generator.
struct BezierOptions {
  int segments = 1;
  double duration = 20.0;
  int waypoints = 200;
  Eigen::Vector3d workspace_center{0.5, 0.0, 0.4};
  double workspace_radius = 0.25;
  /// Control orientations are base_orientation * Rz(spin) * tilt with the
  /// tilt axis horizontal and |tilt| <= max_tilt, |spin| <= max_spin.
  Eigen::Quaterniond base_orientation = Eigen::Quaterniond::Identity();
  double max_tilt = 0.5;
  double max_spin = 0.5;
};

/// One cubic segment of the generated curve: four position control points and
/// four control orientations.
struct BezierSegment {
  std::array<Eigen::Vector3d, 4> points;
  std::array<Eigen::Quaterniond, 4> rotations;
};

/// Position and cumulative quaternion Bezier evaluated at u in [0, 1].
Eigen::Vector3d bezier_position(const BezierSegment& seg, double u);
Eigen::Quaterniond bezier_orientation(const BezierSegment& seg, double u);

/// Draws `segments` C1-joined control polygons (join tangents mirrored for both
/// position and orientation).
std::vector<BezierSegment> random_bezier_segments(std::mt19937_64& rng, const BezierOptions& opts);

/// Samples the chained curve at `waypoint_count` uniform timestamps over
/// [0, duration]; each segment covers an equal share of the time.
Trajectory sample_segments(const std::vector<BezierSegment>& segments, double duration,
                           int waypoint_count);

/// Random trajectory satisfying the density assumption; the waypoint count is
/// raised automatically when the requested one is too coarse.
Trajectory generate_bezier(std::mt19937_64& rng, const BezierOptions& opts);

/// Trajectory CSV: header `t,x,y,z,qw,qx,qy,qz`. Throws LoadError.
Trajectory load_trajectory(const std::filesystem::path& path);
void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace anytrack
