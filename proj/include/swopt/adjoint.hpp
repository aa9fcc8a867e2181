#pragma once

#include "swopt/model.hpp"
#include "swopt/signal.hpp"
#include "swopt/sim.hpp"

namespace swopt {

/// Costate samples p(t) on the same layout as the forward trajectory.
struct CostateTrajectory {
  std::vector<double> edges;
  int substeps = 1;
  MatrixXd costates;  ///< n_x by samples
  bool terminal_kink = false;  ///< terminal gradient hit the cost's kink convention

  auto costate(int j) const { return costates.col(j); }
};

/// Costate of the discrete forward scheme: p_j = dJ/dx_j, swept back through each RK4
/// step from p(t_f) = grad h(x(t_f)). Approximates dp/dt = -(df/dx)^T p to fourth order.
CostateTrajectory integrate_costate(const SwitchedProblem& problem, const Trajectory& traj,
                                    const RelaxedSignal& s);

/// Per-cell integrals of p^T f_i (rows: cells, columns: modes), weighted by the RK4
/// stages so that they are exactly dJ/dd_ci of the computed J.
MatrixXd mode_integrals(const SwitchedProblem& problem, const Trajectory& traj,
                        const CostateTrajectory& costate, const RelaxedSignal& s);

/// DJ(ξ; η) for a direction η on the d-components (rows: cells, columns: modes).
double directional_derivative_J(const SwitchedProblem& problem, const Trajectory& traj,
                                const CostateTrajectory& costate, const RelaxedSignal& s,
                                const MatrixXd& eta);

/// Everything the optimality function computes at one signal.
struct ThetaResult {
  double theta = 0.0;
  RelaxedSignal direction;  ///< vertex-valued minimiser ξ̂ of DJ(ξ; ξ' - ξ)
  double J = 0.0;
  Trajectory traj;
  CostateTrajectory costate;
  MatrixXd integrals;
};

/**
 * θ_r(ξ) = min over relaxed ξ' of DJ(ξ; ξ' - ξ).
 *
 * The direction is linear and the feasible set is a product of per-cell simplices,
 * so the minimiser picks in every cell the mode with the smallest integral of
 * p^T f_i (lowest index on ties).
 */
ThetaResult optimality_theta(const SwitchedProblem& problem, const RelaxedSignal& s,
                             const VectorRef& x0, int substeps = kDefaultSubsteps);

struct ThetaCertificate {
  double theta = 0.0;
  bool nonpositive = false;  ///< θ <= tol
  double theta_projected = 0.0;  ///< θ at the projection R_k(ξ)
};

ThetaCertificate theta_certificates(const SwitchedProblem& problem, const RelaxedSignal& s,
                                    const VectorRef& x0, int k, double tol = 1e-10,
                                    int substeps = kDefaultSubsteps);

}  // namespace swopt
