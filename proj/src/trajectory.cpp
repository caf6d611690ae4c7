#include "anytrack/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace anytrack {

namespace {

constexpr const char* kTrajectoryHeader = "t,x,y,z,qw,qx,qy,qz";

// Cumulative Bernstein basis of degree 3, indices 1..3.
std::array<double, 3> cumulative_basis(double u) {
  const double v = 1.0 - u;
  return {1.0 - v * v * v, 3.0 * u * u - 2.0 * u * u * u, u * u * u};
}

Eigen::Vector3d uniform_in_ball(std::mt19937_64& rng, const Eigen::Vector3d& center, double radius) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (;;) {
    const Eigen::Vector3d p(unit(rng), unit(rng), unit(rng));
    if (p.squaredNorm() <= 1.0) return center + radius * p;
  }
}

Eigen::Quaterniond random_control_rotation(std::mt19937_64& rng, const BezierOptions& o) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> heading(-M_PI, M_PI);
  const double spin = o.max_spin * unit(rng);
  const double tilt_dir = heading(rng);
  const double tilt = o.max_tilt * std::sqrt(std::abs(unit(rng)));
  const Eigen::Vector3d tilt_axis(std::cos(tilt_dir), std::sin(tilt_dir), 0.0);
  return canonicalize(o.base_orientation * Eigen::AngleAxisd(spin, Eigen::Vector3d::UnitZ()) *
                      Eigen::AngleAxisd(tilt, tilt_axis));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Trajectory::Trajectory(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints)) {
  if (waypoints_.size() < 2) throw std::invalid_argument("trajectory needs at least 2 waypoints");
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const auto& w = waypoints_[i];
    if (!std::isfinite(w.t) || w.t < 0.0) {
      throw std::invalid_argument("waypoint " + std::to_string(i) + " has invalid timestamp");
    }
    if (i > 0 && !(w.t > waypoints_[i - 1].t)) {
      throw std::invalid_argument("timestamps must be strictly increasing (row " + std::to_string(i) + ")");
    }
    if (std::abs(w.pose.orientation.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("waypoint " + std::to_string(i) + " quaternion is not unit norm");
    }
  }
}

double rotation_angle_between(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  return quaternion_log(a.conjugate() * b).norm();
}

bool Trajectory::is_dense(double max_step_position, double max_step_rotation) const {
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    const auto& a = waypoints_[i - 1].pose;
    const auto& b = waypoints_[i].pose;
    if ((b.position - a.position).norm() > max_step_position) return false;
    if (rotation_angle_between(a.orientation, b.orientation) > max_step_rotation) return false;
  }
  return true;
}

PathStats path_stats(const Trajectory& traj) {
  PathStats s;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const auto& a = traj[i - 1].pose;
    const auto& b = traj[i].pose;
    s.length += (b.position - a.position).norm();
    s.angular_displacement += rotation_angle_between(a.orientation, b.orientation);
  }
  return s;
}

Eigen::Vector3d bezier_position(const BezierSegment& seg, double u) {
  const double v = 1.0 - u;
  return v * v * v * seg.points[0] + 3.0 * v * v * u * seg.points[1] + 3.0 * v * u * u * seg.points[2] +
         u * u * u * seg.points[3];
}

Eigen::Quaterniond bezier_orientation(const BezierSegment& seg, double u) {
  const auto basis = cumulative_basis(u);
  Eigen::Quaterniond q = seg.rotations[0];
  for (std::size_t i = 1; i <= 3; ++i) {
    const Eigen::Vector3d omega = quaternion_log(seg.rotations[i - 1].conjugate() * seg.rotations[i]);
    q = q * quaternion_exp(omega * basis[i - 1]);
  }
  return canonicalize(q);
}

std::vector<BezierSegment> random_bezier_segments(std::mt19937_64& rng, const BezierOptions& o) {
  if (o.segments < 1) throw std::invalid_argument("segments must be >= 1");
  std::vector<BezierSegment> segs;
  segs.reserve(static_cast<std::size_t>(o.segments));
  for (int s = 0; s < o.segments; ++s) {
    BezierSegment seg;
    if (s == 0) {
      seg.points[0] = uniform_in_ball(rng, o.workspace_center, o.workspace_radius);
      seg.points[1] = uniform_in_ball(rng, o.workspace_center, o.workspace_radius);
      seg.rotations[0] = random_control_rotation(rng, o);
      seg.rotations[1] = random_control_rotation(rng, o);
    } else {
      const auto& prev = segs.back();
      seg.points[0] = prev.points[3];
      seg.points[1] = 2.0 * prev.points[3] - prev.points[2];
      seg.rotations[0] = prev.rotations[3];
      seg.rotations[1] = canonicalize(prev.rotations[3] * (prev.rotations[2].conjugate() * prev.rotations[3]));
    }
    seg.points[2] = uniform_in_ball(rng, o.workspace_center, o.workspace_radius);
    seg.points[3] = uniform_in_ball(rng, o.workspace_center, o.workspace_radius);
    seg.rotations[2] = random_control_rotation(rng, o);
    seg.rotations[3] = random_control_rotation(rng, o);
    segs.push_back(seg);
  }
  return segs;
}

Trajectory sample_segments(const std::vector<BezierSegment>& segments, double duration,
                           int waypoint_count) {
  if (segments.empty()) throw std::invalid_argument("no segments to sample");
  if (waypoint_count < 2) throw std::invalid_argument("waypoint count must be >= 2");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  const auto n_seg = static_cast<double>(segments.size());
  std::vector<Waypoint> wps;
  wps.reserve(static_cast<std::size_t>(waypoint_count));
  for (int i = 0; i < waypoint_count; ++i) {
    const double frac = static_cast<double>(i) / (waypoint_count - 1);
    const double global = frac * n_seg;
    std::size_t idx = static_cast<std::size_t>(std::floor(global));
    if (idx >= segments.size()) idx = segments.size() - 1;
    const double u = (i == waypoint_count - 1) ? 1.0 : global - static_cast<double>(idx);
    const auto& seg = segments[idx];
    wps.push_back({frac * duration, Pose(bezier_position(seg, u), bezier_orientation(seg, u))});
  }
  return Trajectory(std::move(wps));
}

Trajectory generate_bezier(std::mt19937_64& rng, const BezierOptions& opts) {
  if (opts.waypoints < 2) throw std::invalid_argument("waypoints must be >= 2");
  const auto segments = random_bezier_segments(rng, opts);
  int count = opts.waypoints;
  for (;;) {
    Trajectory traj = sample_segments(segments, opts.duration, count);
    double ratio = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
      const auto& a = traj[i - 1].pose;
      const auto& b = traj[i].pose;
      ratio = std::max(ratio, (b.position - a.position).norm() / kMaxWaypointStepPosition);
      ratio = std::max(ratio, rotation_angle_between(a.orientation, b.orientation) / kMaxWaypointStepRotation);
    }
    if (ratio <= 1.0) return traj;
    count = static_cast<int>(std::ceil((count - 1) * ratio * 1.05)) + 1;
  }
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open trajectory " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw LoadError(path.string() + ": empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader) {
    throw LoadError(path.string() + ": expected header '" + kTrajectoryHeader + "'");
  }
  std::vector<Waypoint> wps;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    try {
      while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw LoadError(path.string() + ": unparsable number on line " + std::to_string(row));
    }
    if (vals.size() != 8) {
      throw LoadError(path.string() + ": line " + std::to_string(row) + " needs 8 fields");
    }
    const Eigen::Quaterniond q(vals[4], vals[5], vals[6], vals[7]);
    if (std::abs(q.norm() - 1.0) > 1e-6) {
      throw LoadError(path.string() + ": quaternion on line " + std::to_string(row) + " is not unit norm");
    }
    wps.push_back({vals[0], Pose({vals[1], vals[2], vals[3]}, q)});
  }
  try {
    return Trajectory(std::move(wps));
  } catch (const std::invalid_argument& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kTrajectoryHeader << '\n';
  for (const auto& w : traj.waypoints()) {
    const auto& p = w.pose.position;
    const auto& q = w.pose.orientation;
    out << format_number(w.t) << ',' << format_number(p.x()) << ',' << format_number(p.y()) << ','
        << format_number(p.z()) << ',' << format_number(q.w()) << ',' << format_number(q.x()) << ','
        << format_number(q.y()) << ',' << format_number(q.z()) << '\n';
  }
}

}  // namespace anytrack
