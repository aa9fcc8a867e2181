#include "swopt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swopt {

namespace {

void check_inputs(const SwitchedProblem& problem, const RelaxedSignal& s, const VectorRef& x0,
                  int substeps) {
  if (substeps < 1) throw std::invalid_argument("simulate: substeps must be >= 1");
  if (x0.size() != problem.n_x) throw std::invalid_argument("simulate: x0 has wrong dimension");
  if (s.n_sigma() != problem.n_sigma) throw std::invalid_argument("simulate: mode count mismatch");
  if (s.n_u() != problem.n_u) throw std::invalid_argument("simulate: input dimension mismatch");
  if (std::abs(s.t_f() - problem.t_f) > 1e-12 * problem.t_f) {
    throw std::invalid_argument("simulate: signal horizon does not match problem");
  }
}

template <typename Field>
Trajectory integrate(const RelaxedSignal& s, const VectorRef& x0, int substeps, Field&& field) {
  Trajectory traj;
  traj.edges = s.edges();
  traj.substeps = substeps;
  const int n = s.cells();
  const int samples = n * substeps + 1;
  const Eigen::Index nx = x0.size();
  traj.times.resize(samples);
  traj.states.resize(nx, samples);
  traj.states.col(0) = x0;
  traj.times[0] = s.edges()[0];

  VectorXd x = x0, k1(nx), k2(nx), k3(nx), k4(nx), tmp(nx);
  int j = 0;
  for (int c = 0; c < n; ++c) {
    const double t0 = s.edges()[c];
    const double h = s.cell_width(c) / substeps;
    for (int k = 0; k < substeps; ++k) {
      const double t = t0 + k * h;
      field(c, t, x, k1);
      tmp = x + 0.5 * h * k1;
      field(c, t + 0.5 * h, tmp, k2);
      tmp = x + 0.5 * h * k2;
      field(c, t + 0.5 * h, tmp, k3);
      tmp = x + h * k3;
      field(c, t + h, tmp, k4);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite()) {
        throw IntegrationBlowup("state blew up in cell " + std::to_string(c), c);
      }
      ++j;
      traj.states.col(j) = x;
      traj.times[j] = k + 1 == substeps ? s.edges()[c + 1] : t0 + (k + 1) * h;
    }
  }
  return traj;
}

}  // namespace

Trajectory simulate(const SwitchedProblem& problem, const RelaxedSignal& s, const VectorRef& x0,
                    int substeps) {
  check_inputs(problem, s, x0, substeps);
  VectorXd scratch(problem.n_x);
  return integrate(s, x0, substeps,
                   [&](int c, double t, const VectorXd& x, VectorXd& out) {
                     relaxed_field_into(problem, t, x, s.input(c), s.weights(c), out, scratch);
                   });
}

Trajectory simulate_pure_direct(const SwitchedProblem& problem, const PureSignal& s,
                                const VectorRef& x0, int substeps) {
  const RelaxedSignal& r = s;
  check_inputs(problem, r, x0, substeps);
  return integrate(r, x0, substeps, [&](int c, double t, const VectorXd& x, VectorXd& out) {
    problem.modes[s.mode(c)](t, x, r.input(c), out);
  });
}

double cost_J(const SwitchedProblem& problem, const Trajectory& traj) {
  return problem.cost.value(traj.terminal());
}

std::optional<double> psi(const SwitchedProblem& problem, const Trajectory& traj) {
  if (problem.constraints.empty()) return std::nullopt;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : problem.constraints) {
    for (int j = 0; j < traj.samples(); ++j) worst = std::max(worst, h(traj.state(j)));
  }
  return worst;
}

Evaluation evaluate(const SwitchedProblem& problem, const Trajectory& traj) {
  return {cost_J(problem, traj), psi(problem, traj)};
}

double compare_P(const Evaluation& xi1, const Evaluation& xi2) {
  if (!xi1.Psi || !xi2.Psi) return xi2.J - xi1.J;
  if (*xi1.Psi <= 0.0) return std::max(xi2.J - xi1.J, *xi2.Psi);
  return *xi2.Psi - *xi1.Psi;
}

double compare_P(const SwitchedProblem& problem, const Trajectory& xi1_traj,
                 const Trajectory& xi2_traj) {
  return compare_P(evaluate(problem, xi1_traj), evaluate(problem, xi2_traj));
}

}  // namespace swopt
