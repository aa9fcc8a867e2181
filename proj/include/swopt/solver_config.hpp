#pragma once

#include "swopt/sim.hpp"
#include "swopt/topology.hpp"

#include <optional>

namespace swopt {

/// Framework parameters of one solve.
struct SolverConfig {
  double epsilon = 1e-6;  ///< stop once θ_p > -epsilon
  double omega = 0.5;     ///< projection slack, in (0, 1)
  double gamma = 0.01;    ///< sufficient-descent coefficient
  int k0 = 8;
  int k_max = 16;
  std::optional<int> fixed_k;
  int l_max = 20;
  double armijo_alpha = 0.5;
  double armijo_beta = 0.5;
  int max_iter = 200;
  int N = 256;
  int substeps = kDefaultSubsteps;
  TopologyKind topology = TopologyKind::TerminalState;
  double stall_floor = 1e-4;
  // Neighborhood probe, used when Γ̂ cannot move at all: vertex signals on a
  // probe_cells lattice within g-distance neighborhood_radius. probe_cells = 0 disables it.
  double neighborhood_radius = 0.75;
  int probe_cells = 16;

  /// Throws std::invalid_argument naming the first out-of-range field.
  void validate() const;
};

}  // namespace swopt
