#pragma once

#include <optional>
#include <string>

#include "anytrack/frameworks.hpp"
#include "anytrack/trajectory.hpp"

namespace anytrack {

/// Desk-scale experiment setups: trajectory shape, robot preset and the
/// framework parameters each experiment compares.
enum class Experiment : std::uint8_t {
  /// 1-segment curves, movement only, no reconfiguration.
  A,
  /// 2-segment curves, reconfigurations allowed.
  B,
  /// 4-segment rotation-heavy curves through an angled tool with free roll.
  C,
};

std::optional<Experiment> parse_experiment(const std::string& name);
const char* to_string(Experiment e);

/// Trajectory generator options for an experiment.
BezierOptions experiment_trajectory(Experiment e);

/// Robot file name, relative to the data/robots directory.
std::string experiment_robot(Experiment e);

/// Framework parameters shared by all frameworks of an experiment
/// (metric, reconfiguration policy, sample counts). Budgets are left to
/// the caller.
FrameworkConfig experiment_config(Experiment e);

}  // namespace anytrack
