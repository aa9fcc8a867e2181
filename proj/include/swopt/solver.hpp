#pragma once

#include "swopt/adjoint.hpp"
#include "swopt/model.hpp"
#include "swopt/project.hpp"
#include "swopt/signal.hpp"
#include "swopt/sim.hpp"
#include "swopt/solver_config.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace swopt {

/// One Armijo-backtracked conditional-gradient step Γ̂.
struct StepResult {
  RelaxedSignal signal;
  double theta = 0.0;
  double lambda = 0.0;  ///< accepted step, 0 when no progress was made
  double J_before = 0.0;
  double J_after = 0.0;
  bool progressed = false;
};

/**
 * Γ̂: move toward the vertex minimiser ξ̂ of the optimality function, accepting the
 * first λ in {1, β, β², ...} with J(ξ + λ(ξ̂ - ξ)) - J(ξ) <= α λ θ.
 */
StepResult gamma_hat_step(const SwitchedProblem& problem, const RelaxedSignal& s,
                          const VectorRef& x0, const SolverConfig& cfg);

struct GammaRResult {
  RelaxedSignal signal;
  int l = 0;
  bool flagged = false;  ///< l_max reached without the sufficient-descent condition
  double theta = 0.0;    ///< θ_r at the input
  double J_start = 0.0;
  double J_end = 0.0;
  std::optional<double> Psi_start;
  std::optional<double> Psi_end;
  std::vector<double> J_steps;  ///< J after every accepted Γ̂ step
};

/// Γ_r = Γ̂^l with l the first repetition count reaching J(Γ̂^l ξ) - J(ξ) <= γ θ_r(ξ).
GammaRResult gamma_r(const SwitchedProblem& problem, const RelaxedSignal& s, const VectorRef& x0,
                     const SolverConfig& cfg);

/**
 * Q(ξ, k): change of J and Ψ under R_k applied to Γ_r(ξ). Holds Γ_r(ξ) so a scan
 * over k reuses one inner descent.
 */
class QFunction {
 public:
  QFunction(const SwitchedProblem& problem, const RelaxedSignal& s, const VectorRef& x0,
            const SolverConfig& cfg);
  QFunction(const SwitchedProblem& problem, GammaRResult inner, Evaluation at_xi,
            const VectorRef& x0, const SolverConfig& cfg);

  double operator()(int k) const;
  const GammaRResult& inner() const { return inner_; }
  /// R_k(Γ_r(ξ)) for the last k evaluated.
  const std::optional<PureSignal>& last_projection() const { return last_projection_; }
  std::optional<Evaluation> last_projection_eval() const { return last_eval_; }

 private:
  const SwitchedProblem& problem_;
  GammaRResult inner_;
  Evaluation at_xi_;
  Evaluation at_inner_;
  VectorXd x0_;
  SolverConfig cfg_;
  mutable std::optional<PureSignal> last_projection_;
  mutable std::optional<Evaluation> last_eval_;
};

double Q_function(const SwitchedProblem& problem, const RelaxedSignal& s, int k,
                  const VectorRef& x0, const SolverConfig& cfg);

enum class SolveStatus { Stationary, Stalled, MaxIter };
std::string to_string(SolveStatus status);

/// Telemetry of one outer iteration, recorded at ξ^i before the update.
struct IterationRecord {
  int iter = 0;
  double J = 0.0;
  double theta = 0.0;  ///< θ_p(ξ^i)
  std::optional<double> Psi;
  int k_used = 0;      ///< 0 on the terminating record
  int l_used = 0;
  double Q_value = 0.0;
  VectorXd terminal;
  double wall_ms = 0.0;

  // Framework-condition monitors for the update out of ξ^i.
  double theta_r = 0.0;          ///< θ_r at the descent-grid copy of ξ^i
  double descent = 0.0;          ///< J(Γ_r(ξ)) - J(ξ)
  double projection_bound = 0.0;     ///< (ω - 1) γ θ_p
  bool l_flagged = false;        ///< Γ_r hit l_max
  bool k_flagged = false;        ///< no k met the projection bound
  double trajectory_change = 0.0;  ///< path distance to the next iterate
  bool neighborhood_move = false;  ///< next iterate came from the neighborhood probe
  bool flagged() const { return l_flagged || k_flagged || neighborhood_move; }
};

/**
 * Every vertex signal on a uniform lattice, simulated once. Used to look for a cheaper
 * input inside N_{T_g}(ξ, r) when Γ̂ cannot move: under the terminal-state topology
 * that ball holds inputs with far-apart trajectories, under the trajectory topology it
 * does not.
 */
class NeighborhoodProbe {
 public:
  NeighborhoodProbe(const SwitchedProblem& problem, const VectorRef& x0, int cells, int substeps,
                    long budget = 1'000'000);

  long size() const { return static_cast<long>(evals_.size()); }
  PureSignal candidate(long index) const;
  const Evaluation& evaluation(long index) const { return evals_[index]; }
  const VectorXd terminal(long index) const { return terminals_.col(index); }

  /**
   * Closest candidate (ties: cheaper, then lexicographically first) that improves on
   * `at` under compare_P and lies within `radius` of `traj`. Under FullTrajectory,
   * `traj` must be simulated on `layout`, onto which candidates are refined.
   */
  std::optional<long> nearest_improving(TopologyKind kind, const Trajectory& traj,
                                        const Evaluation& at, double radius,
                                        const Grid& layout) const;

 private:
  const SwitchedProblem& problem_;
  VectorXd x0_;
  Grid lattice_;
  int substeps_;
  std::vector<Evaluation> evals_;
  MatrixXd terminals_;
};

struct SolveResult {
  PureSignal solution;
  std::vector<IterationRecord> history;
  SolveStatus status = SolveStatus::MaxIter;
};

/**
 * Outer iteration ξ^{i+1} = R_k(Γ_r(ξ^i)) on pure signals.
 *
 * Descent runs on the uniform cfg.N grid: each pure iterate is averaged onto it
 * before Γ_r, while the iterate returned keeps its exact pulse edges. When Γ̂ accepts
 * no step at all, the next iterate is the nearest improving lattice signal in
 * N_{T_g}(ξ, cfg.neighborhood_radius), if there is one.
 */
SolveResult solve(const SwitchedProblem& problem, const VectorRef& x0, const PureSignal& s0,
                  const SolverConfig& cfg);

struct OracleResult {
  PureSignal best;
  double best_cost = 0.0;
  long candidates = 0;
};

/// Exhaustive search over vertex-valued signals on a coarse grid.
OracleResult oracle_enumerate(const SwitchedProblem& problem, const VectorRef& x0,
                              const Grid& coarse, long budget = 1'000'000,
                              int substeps = kDefaultSubsteps);

}  // namespace swopt
