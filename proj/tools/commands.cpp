#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "anytrack/frameworks.hpp"
#include "anytrack/io.hpp"
#include "anytrack/presets.hpp"
#include "anytrack/trajectory.hpp"

namespace anytrack::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerateArgs {
  std::string preset;
  int segments = 1;
  int waypoints = 200;
  double duration = 20.0;
  double radius = 0.25;
  std::vector<double> center;
  double max_tilt = 0.5;
  double max_spin = 0.5;
  std::uint64_t seed = 1;
  std::string out;
};

struct FrameworkArgs {
  std::string robot;
  std::string trajectory;
  std::string metric = "movement";
  bool allow_reconfig = false;
  std::size_t m = 250;
  std::size_t delta_m = 25;
  std::size_t m0 = 50;
  std::size_t md = 5;
  std::size_t s = 5;
  double delta = 0.2;
  double eta = 1.1;
  std::size_t retire_after = 3;
  bool fixed_sparse = false;
  double budget_secs = 0.0;
  std::size_t budget_iters = 0;
  std::uint64_t seed = 1;
  std::string clock = "work";
};

struct TrackArgs {
  std::string framework = "guided";
  std::string solution_out;
  std::string trace_out;
};

struct CompareArgs {
  std::vector<std::string> frameworks{"guided", "conventional"};
  std::size_t runs = 1;
  std::vector<std::size_t> s_sweep;
  std::string out_dir;
};

void add_framework_flags(CLI::App* cmd, FrameworkArgs& a) {
  cmd->add_option("--robot", a.robot, "Robot description (JSON)")->required();
  cmd->add_option("--trajectory", a.trajectory, "Trajectory CSV")->required();
  cmd->add_option("--metric", a.metric, "movement | maxdelta | lex")
      ->check(CLI::IsMember({"movement", "maxdelta", "lex"}));
  cmd->add_flag("--allow-reconfig", a.allow_reconfig, "Admit reconfiguration edges");
  cmd->add_option("--m", a.m, "Conventional: samples per waypoint")->check(CLI::PositiveNumber);
  cmd->add_option("--delta-m", a.delta_m, "Naive: samples per waypoint per iteration")->check(CLI::PositiveNumber);
  cmd->add_option("--m0", a.m0, "Guided: samples per sparse layer")->check(CLI::PositiveNumber);
  cmd->add_option("--md", a.md, "Guided: base targeted samples per layer")->check(CLI::PositiveNumber);
  cmd->add_option("--s", a.s, "Guided: sparse step in layers")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", a.delta, "Guided: targeted seed stddev (rad)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--eta", a.eta, "Guided: per-iteration growth factor")->check(CLI::Range(1.0, 1e9));
  cmd->add_option("--retire-after", a.retire_after, "Guided: retire stale sparse edges after N tries (0 = never)");
  cmd->add_flag("--fixed-sparse", a.fixed_sparse, "Guided: sample sparse layers in the first iteration only");
  cmd->add_option("--budget-secs", a.budget_secs, "Time budget in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--budget-iters", a.budget_iters, "Iteration budget")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "Master random seed");
  cmd->add_option("--clock", a.clock, "wall | work (work is reproducible)")
      ->check(CLI::IsMember({"wall", "work"}));
}

FrameworkConfig make_config(const FrameworkArgs& a) {
  FrameworkConfig cfg;
  cfg.metric = *parse_metric(a.metric);
  cfg.allow_reconfig = a.allow_reconfig;
  cfg.m = a.m;
  cfg.delta_m = a.delta_m;
  cfg.m0 = a.m0;
  cfg.md = a.md;
  cfg.s = a.s;
  cfg.delta = a.delta;
  cfg.eta = a.eta;
  cfg.retire_after = a.retire_after;
  cfg.grow_sparse = !a.fixed_sparse;
  cfg.seed = a.seed;
  cfg.clock = a.clock == "wall" ? ClockMode::Wall : ClockMode::Work;
  cfg.budget = {};
  if (a.budget_secs > 0.0) cfg.budget.seconds = a.budget_secs;
  if (a.budget_iters > 0) cfg.budget.iterations = a.budget_iters;
  if (!cfg.budget.seconds && !cfg.budget.iterations) cfg.budget.iterations = 20;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::string cost_string(const Cost& c) {
  std::ostringstream ss;
  ss << c;
  return ss.str();
}

int cmd_generate(const GenerateArgs& a, const CLI::App& cmd) {
  BezierOptions o;
  if (!a.preset.empty()) o = experiment_trajectory(*parse_experiment(a.preset));
  auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
  if (given("--segments") || a.preset.empty()) o.segments = a.segments;
  if (given("--waypoints") || a.preset.empty()) o.waypoints = a.waypoints;
  if (given("--duration") || a.preset.empty()) o.duration = a.duration;
  if (given("--radius") || a.preset.empty()) o.workspace_radius = a.radius;
  if (given("--max-tilt") || a.preset.empty()) o.max_tilt = a.max_tilt;
  if (given("--max-spin") || a.preset.empty()) o.max_spin = a.max_spin;
  if (given("--center")) o.workspace_center = {a.center[0], a.center[1], a.center[2]};
  if (o.segments < 1) throw UsageError("--segments must be >= 1");
  if (o.waypoints < 2) throw UsageError("--waypoints must be >= 2");
  if (!(o.duration > 0.0)) throw UsageError("--duration must be positive");
  if (!(o.workspace_radius >= 0.0)) throw UsageError("--radius must be >= 0");

  std::mt19937_64 rng(a.seed);
  const Trajectory traj = generate_bezier(rng, o);
  save_trajectory(traj, a.out);
  const PathStats st = path_stats(traj);
  std::cout << "waypoints " << traj.size() << "\nlength_m " << format_double(st.length)
            << "\nangular_displacement_rad " << format_double(st.angular_displacement) << '\n';
  return kExitOk;
}

struct Inputs {
  KinematicChain chain;
  Trajectory traj;
};

Inputs load_inputs(const FrameworkArgs& a) {
  return {load_chain(a.robot), load_trajectory(a.trajectory)};
}

int cmd_track(const FrameworkArgs& fa, const TrackArgs& ta) {
  const auto kind = parse_framework(ta.framework);
  const FrameworkConfig cfg = make_config(fa);
  const Inputs in = load_inputs(fa);
  const RunResult r = run_framework(*kind, in.chain, in.traj, cfg);

  if (!ta.trace_out.empty()) write_trace_csv(fs::path(ta.trace_out), r.trace);
  std::cout << "framework " << to_string(*kind) << "\niterations " << r.stats.iterations << "\nik_solves "
            << r.stats.ik.solves << "\nvertices " << r.graph.vertex_count() << '\n';
  if (!r.solved()) {
    std::cout << "solution none (furthest layer " << r.furthest_layer << " of " << in.traj.size() << ")\n";
    return kExitNoSolution;
  }
  if (!ta.solution_out.empty()) write_solution_csv(fs::path(ta.solution_out), r.graph, *r.solution);
  std::cout << "time_to_first_solution_s " << format_double(*r.trace.time_to_first_solution())
            << "\nfinal_cost " << cost_string(*r.trace.final_cost()) << '\n';
  return kExitOk;
}

struct Aggregate {
  std::string framework;
  std::size_t s = 0;
  std::size_t runs = 0;
  std::size_t solved = 0;
  double ttfs_sum = 0.0;
  std::vector<Cost> finals;
};

int cmd_compare(const FrameworkArgs& fa, const CompareArgs& ca) {
  std::vector<FrameworkKind> kinds;
  for (const auto& name : ca.frameworks) {
    const auto k = parse_framework(name);
    if (!k) throw UsageError("unknown framework '" + name + "'");
    kinds.push_back(*k);
  }
  const FrameworkConfig base = make_config(fa);
  const Inputs in = load_inputs(fa);
  const fs::path out_dir(ca.out_dir);
  fs::create_directories(out_dir / "runs");

  std::ostringstream runs_csv;
  runs_csv << "framework,s,seed,solved,time_to_first_solution_s,final_reconfigs,final_movement_rad,iterations\n";
  std::vector<Aggregate> aggregates;

  for (const FrameworkKind kind : kinds) {
    std::vector<std::size_t> steps{base.s};
    if (kind == FrameworkKind::Guided && !ca.s_sweep.empty()) steps = ca.s_sweep;
    for (const std::size_t s : steps) {
      Aggregate agg{to_string(kind), kind == FrameworkKind::Guided ? s : 0, 0, 0, 0.0, {}};
      for (std::size_t i = 0; i < ca.runs; ++i) {
        FrameworkConfig cfg = base;
        cfg.s = s;
        cfg.seed = base.seed + i;
        const RunResult r = run_framework(kind, in.chain, in.traj, cfg);
        std::string stem = agg.framework;
        if (kind == FrameworkKind::Guided) stem += "_s" + std::to_string(s);
        stem += "_seed" + std::to_string(cfg.seed);
        write_trace_csv(out_dir / "runs" / (stem + "_trace.csv"), r.trace);

        ++agg.runs;
        runs_csv << agg.framework << ',' << agg.s << ',' << cfg.seed << ',' << (r.solved() ? 1 : 0) << ',';
        if (r.solved()) {
          ++agg.solved;
          const double t = *r.trace.time_to_first_solution();
          const Cost c = *r.trace.final_cost();
          agg.ttfs_sum += t;
          agg.finals.push_back(c);
          runs_csv << format_double(t) << ',' << c.reconfigs << ',' << format_double(c.movement);
        } else {
          runs_csv << ",,";
        }
        runs_csv << ',' << r.stats.iterations << '\n';
      }
      aggregates.push_back(std::move(agg));
    }
  }

  std::ostringstream agg_csv;
  agg_csv << "framework,s,runs,solved,failures,mean_time_to_first_solution_s,best_reconfigs,best_movement_rad,"
             "mean_reconfigs,mean_movement_rad,worst_reconfigs,worst_movement_rad\n";
  for (const auto& a : aggregates) {
    agg_csv << a.framework << ',' << a.s << ',' << a.runs << ',' << a.solved << ',' << (a.runs - a.solved) << ',';
    if (a.finals.empty()) {
      agg_csv << ",,,,,,\n";
      continue;
    }
    const auto [best, worst] = std::minmax_element(a.finals.begin(), a.finals.end());
    double mean_r = 0.0, mean_m = 0.0;
    for (const auto& c : a.finals) {
      mean_r += c.reconfigs;
      mean_m += c.movement;
    }
    const auto n = static_cast<double>(a.finals.size());
    agg_csv << format_double(a.ttfs_sum / n) << ',' << best->reconfigs << ',' << format_double(best->movement)
            << ',' << format_double(mean_r / n) << ',' << format_double(mean_m / n) << ',' << worst->reconfigs
            << ',' << format_double(worst->movement) << '\n';
  }
  write_file_atomic(out_dir / "runs.csv", runs_csv.str());
  write_file_atomic(out_dir / "aggregate.csv", agg_csv.str());
  std::cout << agg_csv.str();
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Anytime end-effector trajectory tracking"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a random Bezier trajectory");
  generate->add_option("--preset", gen.preset, "Experiment preset: A | B | C")
      ->check(CLI::IsMember({"A", "B", "C", "a", "b", "c"}));
  generate->add_option("--segments", gen.segments, "Number of cubic segments");
  generate->add_option("--waypoints", gen.waypoints, "Minimum waypoint count");
  generate->add_option("--duration", gen.duration, "Duration in seconds");
  generate->add_option("--radius", gen.radius, "Workspace ball radius (m)");
  generate->add_option("--center", gen.center, "Workspace ball center x y z (m)")->expected(3);
  generate->add_option("--max-tilt", gen.max_tilt, "Maximum tool tilt (rad)");
  generate->add_option("--max-spin", gen.max_spin, "Maximum spin about the vertical (rad)");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--out", gen.out, "Output CSV")->required();

  FrameworkArgs track_fw;
  TrackArgs track_args;
  auto* track = app.add_subcommand("track", "Track a trajectory with one framework");
  track->add_option("--framework", track_args.framework, "conventional | naive | guided")
      ->check(CLI::IsMember({"conventional", "naive", "guided"}));
  add_framework_flags(track, track_fw);
  track->add_option("--solution", track_args.solution_out, "Solution CSV output");
  track->add_option("--trace", track_args.trace_out, "Anytime trace CSV output");

  FrameworkArgs cmp_fw;
  CompareArgs cmp_args;
  auto* compare = app.add_subcommand("compare", "Run several frameworks over consecutive seeds");
  add_framework_flags(compare, cmp_fw);
  compare->add_option("--frameworks", cmp_args.frameworks, "Frameworks to compare")->delimiter(',');
  compare->add_option("--runs", cmp_args.runs, "Runs per framework")->check(CLI::PositiveNumber);
  compare->add_option("--s-sweep", cmp_args.s_sweep, "Sparse steps to sweep for guided, e.g. 3,5,10")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  compare->add_option("--out-dir", cmp_args.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) {
      if (!gen.preset.empty()) gen.preset[0] = static_cast<char>(std::toupper(gen.preset[0]));
      return cmd_generate(gen, *generate);
    }
    if (*track) return cmd_track(track_fw, track_args);
    return cmd_compare(cmp_fw, cmp_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitLoad;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace anytrack::cli
