#include "anytrack/presets.hpp"

#include <cmath>

namespace anytrack {

std::optional<Experiment> parse_experiment(const std::string& name) {
  if (name == "A" || name == "a") return Experiment::A;
  if (name == "B" || name == "b") return Experiment::B;
  if (name == "C" || name == "c") return Experiment::C;
  return std::nullopt;
}

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::A: return "A";
    case Experiment::B: return "B";
    case Experiment::C: return "C";
  }
  return "?";
}

BezierOptions experiment_trajectory(Experiment e) {
  BezierOptions o;
  // Tool pointing down, curves inside a ball in front of the robot.
  o.base_orientation = Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()));
  o.workspace_center = {0.55, 0.0, 0.45};
  o.workspace_radius = 0.2;
  o.waypoints = 200;
  switch (e) {
    case Experiment::A:
      o.segments = 1;
      o.duration = 20.0;
      o.max_tilt = 0.5;
      o.max_spin = 0.5;
      break;
    case Experiment::B:
      o.segments = 2;
      o.duration = 40.0;
      o.waypoints = 400;
      o.max_tilt = 0.8;
      o.max_spin = 1.5;
      break;
    case Experiment::C:
      o.segments = 4;
      o.duration = 40.0;
      o.waypoints = 400;
      o.max_tilt = 1.4;
      o.max_spin = 0.5;
      break;
  }
  return o;
}

std::string experiment_robot(Experiment e) {
  switch (e) {
    case Experiment::A: return "iiwa7.json";
    case Experiment::B: return "panda.json";
    case Experiment::C: return "panda_weld45.json";
  }
  return {};
}

FrameworkConfig experiment_config(Experiment e) {
  FrameworkConfig cfg;
  cfg.s = 5;
  cfg.m0 = 50;
  cfg.md = 5;
  cfg.delta = 0.2;
  cfg.eta = 1.1;
  switch (e) {
    case Experiment::A:
      cfg.metric = Metric::MovementOnly;
      cfg.allow_reconfig = false;
      cfg.m = 250;
      break;
    case Experiment::B:
      cfg.metric = Metric::LexReconfigMovement;
      cfg.allow_reconfig = true;
      cfg.m = 300;
      break;
    case Experiment::C:
      cfg.metric = Metric::LexReconfigMovement;
      cfg.allow_reconfig = true;
      cfg.m = 300;
      cfg.m0 = 500;
      break;
  }
  return cfg;
}

}  // namespace anytrack
