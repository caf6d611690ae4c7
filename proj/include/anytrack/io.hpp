#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "anytrack/frameworks.hpp"

namespace anytrack {

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

/// Solution CSV: `t,q1,...,qk,reconfig`; reconfig=1 marks the first
/// configuration after a reconfiguration jump.
void write_solution_csv(std::ostream& out, const LayeredGraph& graph, const PathResult& solution);
void write_solution_csv(const std::filesystem::path& path, const LayeredGraph& graph, const PathResult& solution);

/// Trace CSV: `iteration,elapsed_s,reconfigs,movement_rad`.
void write_trace_csv(std::ostream& out, const AnytimeTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const AnytimeTrace& trace);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace anytrack
