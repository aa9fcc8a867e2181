#include "swopt/cli.hpp"

#include "swopt/acceptance.hpp"
#include "swopt/adjoint.hpp"
#include "swopt/config.hpp"
#include "swopt/io.hpp"
#include "swopt/project.hpp"
#include "swopt/solver.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace swopt::cli {

namespace {

struct Options {
  std::string config;
  std::optional<std::string> topology;
  std::optional<std::string> out;
  std::optional<int> k;
  std::string input;
  bool seedless = true;
  bool sabotage = false;
};

RunConfig run_config(const Options& o) {
  RunConfig rc = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.topology) rc.solver.topology = parse_topology(*o.topology);
  if (o.out) rc.output_dir = *o.out;
  return rc;
}

PureSignal initial_signal(const RunConfig& rc, const SwitchedProblem& p) {
  const Grid g(p.t_f, rc.solver.N);
  switch (rc.initial.kind) {
    case InitialSpec::Kind::Default:
      if (p.name != "paper_example") return constant_mode_signal(g, p.n_sigma, 0, p.n_u);
      return initial_signal_paper(g);
    case InitialSpec::Kind::Mode:
      if (rc.initial.mode >= p.n_sigma) throw std::invalid_argument("initial mode out of range");
      return constant_mode_signal(g, p.n_sigma, rc.initial.mode, p.n_u);
    case InitialSpec::Kind::File:
      return PureSignal(read_signal_csv(rc.initial.path));
  }
  throw std::logic_error("unreachable");
}

std::vector<SvgMarker> markers_for(const SwitchedProblem& p) {
  if (p.name == "paper_example") return {{"A", 3.0, 2.0}, {"B", 3.0, 1.0}};
  return {};
}

void write_all(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  for (const auto& [name, text] : files) write_file((std::filesystem::path(dir) / name).string(), text);
}

std::string output_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int cmd_solve(const Options& o, std::ostream& out) {
  const RunConfig rc = run_config(o);
  const SwitchedProblem p = load_problem(rc.problem, rc.base_dir);
  const SolveResult r = solve(p, p.x0, initial_signal(rc, p), rc.solver);
  const auto markers = markers_for(p);
  write_all(rc.output_dir, solve_artifacts(p, p.x0, r, rc.solver.substeps, rc.emit_plots ? &markers : nullptr,
                                           p.name + ", " + to_string(rc.solver.topology)));
  const IterationRecord& last = r.history.back();
  out << "status " << to_string(r.status) << '\n'
      << "iterations " << r.history.size() - 1 << '\n'
      << "J " << format_double(last.J) << '\n'
      << "theta " << format_double(last.theta) << '\n'
      << "terminal";
  for (Eigen::Index i = 0; i < last.terminal.size(); ++i) out << ' ' << format_double(last.terminal[i]);
  out << "\noutput " << rc.output_dir << '\n';
  switch (r.status) {
    case SolveStatus::Stationary: return kStationary;
    case SolveStatus::Stalled: return kStalled;
    case SolveStatus::MaxIter: return kMaxIter;
  }
  return kError;
}

int cmd_project(const Options& o, std::ostream& out) {
  if (o.input.empty()) throw std::invalid_argument("project: input signal CSV required");
  if (!o.k) throw std::invalid_argument("project: --k required");
  const RelaxedSignal s = read_signal_csv(o.input);
  const PureSignal r = project_Rk(s, *o.k);
  std::ostringstream csv;
  write_signal_csv(csv, r);
  const std::string dir = o.out.value_or(".");
  write_file(output_path(dir, "projected_signal.csv"), csv.str());
  out << "cells " << r.relaxed().cells() << "\noutput " << output_path(dir, "projected_signal.csv") << '\n';
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  if (o.input.empty()) throw std::invalid_argument("simulate: input signal CSV required");
  const RunConfig rc = run_config(o);
  const SwitchedProblem p = load_problem(rc.problem, rc.base_dir);
  const Trajectory t = simulate(p, read_signal_csv(o.input), p.x0, rc.solver.substeps);
  std::ostringstream csv;
  write_trajectory_csv(csv, t);
  const std::string dir = o.out.value_or(".");
  write_file(output_path(dir, "trajectory.csv"), csv.str());
  out << "J " << format_double(cost_J(p, t)) << "\nterminal";
  for (Eigen::Index i = 0; i < t.terminal().size(); ++i) out << ' ' << format_double(t.terminal()[i]);
  out << "\noutput " << output_path(dir, "trajectory.csv") << '\n';
  return 0;
}

int cmd_theta(const Options& o, std::ostream& out) {
  if (o.input.empty()) throw std::invalid_argument("theta: input signal CSV required");
  const RunConfig rc = run_config(o);
  const SwitchedProblem p = load_problem(rc.problem, rc.base_dir);
  const ThetaResult th = optimality_theta(p, read_signal_csv(o.input), p.x0, rc.solver.substeps);
  out << "theta " << format_double(th.theta) << "\nJ " << format_double(th.J) << '\n';
  if (o.out) {
    std::ostringstream csv;
    write_signal_csv(csv, th.direction);
    write_file(output_path(*o.out, "theta_direction.csv"), csv.str());
    out << "output " << output_path(*o.out, "theta_direction.csv") << '\n';
  }
  return 0;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const RunConfig rc = run_config(o);
  const SwitchedProblem p = load_problem(rc.problem, rc.base_dir);
  const OracleResult r =
      oracle_enumerate(p, p.x0, Grid(p.t_f, rc.oracle_cells), rc.oracle_budget, rc.solver.substeps);
  std::ostringstream csv;
  write_signal_csv(csv, r.best);
  write_file(output_path(rc.output_dir, "oracle_signal.csv"), csv.str());
  out << "candidates " << r.candidates << "\nbest_cost " << format_double(r.best_cost) << "\nmodes ";
  for (int c = 0; c < r.best.relaxed().cells(); ++c) out << r.best.mode(c) + 1;
  out << "\noutput " << output_path(rc.output_dir, "oracle_signal.csv") << '\n';
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
  AcceptanceOptions opts;
  opts.sabotage_q1 = o.sabotage;
  opts.artifact_dir = o.out.value_or("verify_out");
  const AcceptanceReport report = run_acceptance(opts);
  const std::string text = format_report(report);
  write_file(output_path(opts.artifact_dir, "report.txt"), text);
  out << text;
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Switched-system optimal control: relaxed descent with pulse projection"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub, bool input) {
    sub->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
    sub->add_option("--topology", o.topology, "terminal | trajectory (overrides the config)");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_flag("--seedless", o.seedless, "Assert no random numbers are used (always the case)");
    if (input) sub->add_option("input", o.input, "Signal CSV")->check(CLI::ExistingFile);
  };
  auto* solve_cmd = app.add_subcommand("solve", "Run the descent from the configured initial signal");
  common(solve_cmd, false);
  auto* project_cmd = app.add_subcommand("project", "Project a signal CSV onto pure signals");
  common(project_cmd, true);
  project_cmd->add_option("--k", o.k, "Projection frequency, 2^k cells");
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a signal CSV");
  common(simulate_cmd, true);
  auto* theta_cmd = app.add_subcommand("theta", "Optimality function at a signal CSV");
  common(theta_cmd, true);
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive search over coarse vertex signals");
  common(oracle_cmd, false);
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
  common(verify_cmd, false);
  verify_cmd->add_flag("--sabotage", o.sabotage, "Break one rate-table branch first, to check the suite notices");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kError;
  }

  try {
    if (o.topology) parse_topology(*o.topology);
    if (*solve_cmd) return cmd_solve(o, out);
    if (*project_cmd) return cmd_project(o, out);
    if (*simulate_cmd) return cmd_simulate(o, out);
    if (*theta_cmd) return cmd_theta(o, out);
    if (*oracle_cmd) return cmd_oracle(o, out);
    if (*verify_cmd) return cmd_verify(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace swopt::cli
