#pragma once

#include "swopt/signal.hpp"
#include "swopt/sim.hpp"
#include "swopt/solver_config.hpp"
#include "swopt/topology.hpp"

#include <functional>
#include <stdexcept>

namespace swopt {

/**
 * Frequency-modulation projection R_k onto vertex-valued signals.
 *
 * [0, t_f] is split into 2^k cells of width Δ. With two modes, each cell carries a
 * mode-1 pulse of length ∫_cell d_1 centred in the cell, starting at
 * τ + ½∫_cell d_2, with mode 2 on either side. With more modes the cell is filled
 * sequentially in mode order. The output partition contains every cell edge and
 * pulse edge, so per-cell duty cycles are preserved exactly.
 */
PureSignal project_Rk(const RelaxedSignal& s, int k);

/// ||g(R_k(ξ)) - g(ξ)||_Y, with both signals simulated on the union of their partitions.
double projection_error(const SwitchedProblem& problem, const RelaxedSignal& s, int k,
                        TopologyKind kind, const VectorRef& x0, int substeps = kDefaultSubsteps);

/// Simulate two signals on the union of their partitions so their paths share a layout.
std::pair<Trajectory, Trajectory> simulate_common(const SwitchedProblem& problem,
                                                  const RelaxedSignal& a, const RelaxedSignal& b,
                                                  const VectorRef& x0, int substeps);

/// Right-hand side of the projection test, (ω - 1) γ θ_p.
inline double projection_bound(double omega, double gamma, double theta_p) {
  return (omega - 1.0) * gamma * theta_p;
}

struct KChoice {
  int k = 0;
  double Q = 0.0;
  double bound = 0.0;
};

/// No k in [k0, k_max] met the projection bound; carries the best candidate seen.
class KSelectionError : public std::runtime_error {
 public:
  explicit KSelectionError(KChoice best)
      : std::runtime_error("no projection frequency k <= k_max meets the projection bound"),
        best_(best) {}
  const KChoice& best() const { return best_; }

 private:
  KChoice best_;
};

/// Smallest k in [cfg.k0, cfg.k_max] with Q(k) <= (ω - 1) γ θ_p. Requires θ_p < 0.
KChoice adapt_k(const std::function<double(int)>& Q, double theta_p, const SolverConfig& cfg);

}  // namespace swopt
