#pragma once

#include "swopt/model.hpp"
#include "swopt/signal.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swopt {

/// Default RK4 substeps per control cell.
inline constexpr int kDefaultSubsteps = 4;

/// Raised when a state or costate stops being finite.
class IntegrationBlowup : public std::runtime_error {
 public:
  IntegrationBlowup(const std::string& what, int cell) : std::runtime_error(what), cell_(cell) {}
  int cell() const { return cell_; }

 private:
  int cell_;
};

/**
 * Sampled state path x(t; ξ). Sample j = c * substeps + s lies in cell c of the
 * driving signal's partition; there are cells * substeps + 1 samples.
 */
struct Trajectory {
  std::vector<double> edges;
  int substeps = 1;
  std::vector<double> times;
  MatrixXd states;  ///< n_x by samples

  int cells() const { return static_cast<int>(edges.size()) - 1; }
  int samples() const { return static_cast<int>(times.size()); }
  auto state(int j) const { return states.col(j); }
  auto terminal() const { return states.col(states.cols() - 1); }
  bool same_layout(const Trajectory& other) const {
    return substeps == other.substeps && edges == other.edges;
  }
};

/// Fixed-step classical RK4 with `substeps` steps per cell, holding (d, u) constant per cell.
Trajectory simulate(const SwitchedProblem& problem, const RelaxedSignal& s, const VectorRef& x0,
                    int substeps = kDefaultSubsteps);

/// Integrate a vertex-valued signal by switching the active field directly.
Trajectory simulate_pure_direct(const SwitchedProblem& problem, const PureSignal& s,
                                const VectorRef& x0, int substeps = kDefaultSubsteps);

/// J = h(x(t_f)).
double cost_J(const SwitchedProblem& problem, const Trajectory& traj);

/// Max of h_j over trajectory samples; nullopt when the problem has no constraints.
std::optional<double> psi(const SwitchedProblem& problem, const Trajectory& traj);

/// J and Ψ of one trajectory, the inputs of the comparison functions.
struct Evaluation {
  double J = 0.0;
  std::optional<double> Psi;
};

Evaluation evaluate(const SwitchedProblem& problem, const Trajectory& traj);

/// Comparison function P(ξ1, ξ2). Unconstrained problems reduce to J2 - J1.
double compare_P(const Evaluation& xi1, const Evaluation& xi2);
double compare_P(const SwitchedProblem& problem, const Trajectory& xi1_traj,
                 const Trajectory& xi2_traj);

}  // namespace swopt
