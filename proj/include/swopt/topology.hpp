#pragma once

#include "swopt/sim.hpp"

#include <string>

namespace swopt {

/// The map g whose weak topology defines "nearby" controls.
enum class TopologyKind {
  TerminalState,  ///< g(ξ) = x(t_f; ξ) in Euclidean space
  FullTrajectory  ///< g(ξ) = x(·; ξ) in the L2 path space
};

std::string to_string(TopologyKind kind);
/// Accepts "terminal" / "terminal_state" and "trajectory" / "full_trajectory".
TopologyKind parse_topology(const std::string& text);

/// g(ξ): the terminal state (n_x by 1) or the full sampled path (n_x by samples).
MatrixXd g_image(TopologyKind kind, const Trajectory& traj);

/// ||g(a) - g(b)||_Y. The path distance uses the trapezoidal rule on the RK samples.
double topo_distance(TopologyKind kind, const Trajectory& traj_a, const Trajectory& traj_b);

}  // namespace swopt
