#include "anytrack/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace anytrack {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_solution_csv(std::ostream& out, const LayeredGraph& graph, const PathResult& solution) {
  if (!solution.is_solution) throw std::invalid_argument("only dense solutions can be written");
  const std::size_t k = solution.vertices.empty() ? 0 : static_cast<std::size_t>(graph.config(solution.vertices[0]).size());
  out << 't';
  for (std::size_t j = 1; j <= k; ++j) out << ",q" << j;
  out << ",reconfig\n";
  for (std::size_t i = 0; i < solution.vertices.size(); ++i) {
    const VertexId v = solution.vertices[i];
    const JointConfig& q = graph.config(v);
    out << format_double(graph.time(v.layer));
    for (int j = 0; j < q.size(); ++j) out << ',' << format_double(q[j]);
    const bool jump = i > 0 && is_reconfig(solution.edges[i - 1]);
    out << ',' << (jump ? 1 : 0) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const AnytimeTrace& trace) {
  out << "iteration,elapsed_s,reconfigs,movement_rad\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << format_double(r.elapsed) << ',' << r.cost.reconfigs << ','
        << format_double(r.cost.movement) << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_solution_csv(const std::filesystem::path& path, const LayeredGraph& graph, const PathResult& solution) {
  std::ostringstream ss;
  write_solution_csv(ss, graph, solution);
  write_file_atomic(path, ss.str());
}

void write_trace_csv(const std::filesystem::path& path, const AnytimeTrace& trace) {
  std::ostringstream ss;
  write_trace_csv(ss, trace);
  write_file_atomic(path, ss.str());
}

}  // namespace anytrack
