#include "swopt/topology.hpp"

#include <cmath>
#include <stdexcept>

namespace swopt {

std::string to_string(TopologyKind kind) {
  return kind == TopologyKind::TerminalState ? "terminal" : "trajectory";
}

TopologyKind parse_topology(const std::string& text) {
  if (text == "terminal" || text == "terminal_state") return TopologyKind::TerminalState;
  if (text == "trajectory" || text == "full_trajectory") return TopologyKind::FullTrajectory;
  throw std::invalid_argument("unknown topology '" + text + "' (expected terminal|trajectory)");
}

MatrixXd g_image(TopologyKind kind, const Trajectory& traj) {
  if (kind == TopologyKind::TerminalState) return traj.terminal();
  return traj.states;
}

double topo_distance(TopologyKind kind, const Trajectory& traj_a, const Trajectory& traj_b) {
  if (kind == TopologyKind::TerminalState) {
    if (traj_a.states.rows() != traj_b.states.rows()) {
      throw std::invalid_argument("topo_distance: state dimension mismatch");
    }
    return (traj_a.terminal() - traj_b.terminal()).norm();
  }
  if (!traj_a.same_layout(traj_b)) throw std::invalid_argument("topo_distance: layout mismatch");
  const Eigen::ArrayXd sq = (traj_a.states - traj_b.states).colwise().squaredNorm().array();
  double acc = 0.0;
  for (Eigen::Index j = 0; j + 1 < sq.size(); ++j) {
    acc += 0.5 * (sq[j] + sq[j + 1]) * (traj_a.times[j + 1] - traj_a.times[j]);
  }
  return std::sqrt(acc);
}

}  // namespace swopt
