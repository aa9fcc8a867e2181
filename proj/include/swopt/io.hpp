#pragma once

#include "swopt/signal.hpp"
#include "swopt/sim.hpp"
#include "swopt/solver.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace swopt {

/// Malformed input file; the message starts with "source:line:".
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Columns t_start, t_end, d_1.., u_1.., one row per cell.
void write_signal_csv(std::ostream& os, const RelaxedSignal& s);
RelaxedSignal read_signal_csv(std::istream& is, const std::string& source);
RelaxedSignal read_signal_csv(const std::string& path);

/// Columns t, x_1.., one row per RK sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Columns iter, J, theta, psi, k, l, Q, x1_tf, x2_tf.., wall_ms. Psi is written as
/// "unconstrained" when the problem has no constraints.
void write_history_csv(std::ostream& os, const std::vector<IterationRecord>& history);

/// Per-iteration framework monitors (flags, θ_r, descent, projection bound).
void write_telemetry_csv(std::ostream& os, const std::vector<IterationRecord>& history);

/// Path of per-iteration terminal states (first two coordinates) with diamonds at the
/// marked points. Output depends only on the inputs.
struct SvgMarker {
  std::string label;
  double x = 0.0;
  double y = 0.0;
};
std::string terminal_states_svg(const std::vector<IterationRecord>& history,
                                const std::vector<SvgMarker>& markers, const std::string& title);

/// Writes `text` to `path`, creating parent directories. Throws on failure.
void write_file(const std::string& path, const std::string& text);

/// Text of every artifact of one solve, keyed by file name: history.csv,
/// telemetry.csv, solution_signal.csv, trajectory.csv and, with markers given,
/// terminal_states.svg.
std::vector<std::pair<std::string, std::string>> solve_artifacts(
    const SwitchedProblem& problem, const VectorRef& x0, const SolveResult& result, int substeps,
    const std::vector<SvgMarker>* markers, const std::string& title);

}  // namespace swopt
