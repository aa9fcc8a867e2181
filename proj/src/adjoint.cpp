#include "swopt/adjoint.hpp"

#include "swopt/project.hpp"

#include <algorithm>
#include <stdexcept>

namespace swopt {

namespace {

// Reverse sweep through one forward RK4 step x_a -> x_b. Takes p = dJ/dx_b and
// returns dJ/dx_a in place; with `modes` set, adds dJ/dd_i for the step to it.
class StepAdjoint {
 public:
  StepAdjoint(const SwitchedProblem& problem)
      : problem_(problem), nx_(problem.n_x), A_(nx_, nx_), scratch_(nx_, nx_) {
    for (auto* v : {&f_, &tmp_, &pbar_, &kbar1_, &kbar2_, &kbar3_, &kbar4_}) v->resize(nx_);
    for (auto& y : y_) y.resize(nx_);
    for (auto& k : k_) k.resize(nx_);
  }

  void operator()(double t, double h, const VectorRef& xa, const VectorRef& u, const VectorRef& d,
                  VectorXd& p, double* modes) {
    // Replay the forward stages exactly.
    const double ts[4] = {t, t + 0.5 * h, t + 0.5 * h, t + h};
    y_[0] = xa;
    relaxed_field_into(problem_, ts[0], y_[0], u, d, k_[0], tmp_);
    y_[1] = xa + 0.5 * h * k_[0];
    relaxed_field_into(problem_, ts[1], y_[1], u, d, k_[1], tmp_);
    y_[2] = xa + 0.5 * h * k_[1];
    relaxed_field_into(problem_, ts[2], y_[2], u, d, k_[2], tmp_);
    y_[3] = xa + h * k_[2];

    kbar4_ = (h / 6.0) * p;
    kbar3_ = (h / 3.0) * p;
    kbar2_ = (h / 3.0) * p;
    kbar1_ = (h / 6.0) * p;
    pbar_ = p;
    VectorXd* kbar[4] = {&kbar1_, &kbar2_, &kbar3_, &kbar4_};
    const double back[4] = {0.0, 0.5 * h, 0.5 * h, h};
    for (int st = 3; st >= 0; --st) {
      if (modes) {
        for (int i = 0; i < problem_.n_sigma; ++i) {
          problem_.modes[i](ts[st], y_[st], u, f_);
          modes[i] += kbar[st]->dot(f_);
        }
      }
      relaxed_jacobian_into(problem_, ts[st], y_[st], u, d, A_, scratch_);
      tmp_.noalias() = A_.transpose() * *kbar[st];
      pbar_ += tmp_;
      if (st > 0) *kbar[st - 1] += back[st] * tmp_;
    }
    p = pbar_;
  }

 private:
  const SwitchedProblem& problem_;
  Eigen::Index nx_;
  MatrixXd A_, scratch_;
  VectorXd f_, tmp_, pbar_, kbar1_, kbar2_, kbar3_, kbar4_;
  VectorXd y_[4], k_[4];
};

}  // namespace

CostateTrajectory integrate_costate(const SwitchedProblem& problem, const Trajectory& traj,
                                    const RelaxedSignal& s) {
  if (traj.edges != s.edges()) throw std::invalid_argument("integrate_costate: layout mismatch");
  const int M = traj.substeps;
  CostateTrajectory out;
  out.edges = traj.edges;
  out.substeps = M;
  out.costates.resize(problem.n_x, traj.samples());

  const CostGradient g = eval_cost_gradient(problem, traj.terminal());
  out.terminal_kink = g.kink;
  VectorXd p = g.grad;
  out.costates.col(traj.samples() - 1) = p;

  StepAdjoint step(problem);
  for (int c = s.cells() - 1; c >= 0; --c) {
    const double h = s.cell_width(c) / M;
    for (int k = M - 1; k >= 0; --k) {
      const int j = c * M + k;
      step(s.edges()[c] + k * h, h, traj.state(j), s.input(c), s.weights(c), p, nullptr);
      if (!p.allFinite()) {
        throw IntegrationBlowup("costate blew up in cell " + std::to_string(c), c);
      }
      out.costates.col(j) = p;
    }
  }
  return out;
}

MatrixXd mode_integrals(const SwitchedProblem& problem, const Trajectory& traj,
                        const CostateTrajectory& costate, const RelaxedSignal& s) {
  if (traj.edges != s.edges() || costate.edges != s.edges()) {
    throw std::invalid_argument("mode_integrals: layout mismatch");
  }
  const int M = traj.substeps;
  MatrixXd I = MatrixXd::Zero(s.cells(), problem.n_sigma);
  std::vector<double> acc(problem.n_sigma);
  StepAdjoint step(problem);
  VectorXd p(problem.n_x);
  for (int c = 0; c < s.cells(); ++c) {
    const double h = s.cell_width(c) / M;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int k = 0; k < M; ++k) {
      const int j = c * M + k;
      p = costate.costate(j + 1);
      step(s.edges()[c] + k * h, h, traj.state(j), s.input(c), s.weights(c), p, acc.data());
    }
    for (int i = 0; i < problem.n_sigma; ++i) I(c, i) = acc[i];
  }
  return I;
}

double directional_derivative_J(const SwitchedProblem& problem, const Trajectory& traj,
                                const CostateTrajectory& costate, const RelaxedSignal& s,
                                const MatrixXd& eta) {
  if (eta.rows() != s.cells() || eta.cols() != s.n_sigma()) {
    throw std::invalid_argument("directional_derivative_J: direction does not match the signal");
  }
  return mode_integrals(problem, traj, costate, s).cwiseProduct(eta).sum();
}

ThetaResult optimality_theta(const SwitchedProblem& problem, const RelaxedSignal& s,
                             const VectorRef& x0, int substeps) {
  ThetaResult r;
  r.traj = simulate(problem, s, x0, substeps);
  r.J = cost_J(problem, r.traj);
  r.costate = integrate_costate(problem, r.traj, s);
  r.integrals = mode_integrals(problem, r.traj, r.costate, s);

  MatrixXd d = MatrixXd::Zero(s.cells(), s.n_sigma());
  double theta = 0.0;
  for (int c = 0; c < s.cells(); ++c) {
    Eigen::Index best = 0;
    // minCoeff returns the first minimum, which is the lowest-index tie-break.
    const double lowest = r.integrals.row(c).minCoeff(&best);
    d(c, best) = 1.0;
    // sum_i d_i (lowest - I_i) is a sum of nonpositive terms.
    for (int i = 0; i < s.n_sigma(); ++i) theta += s.d()(c, i) * (lowest - r.integrals(c, i));
  }
  r.theta = theta;
  r.direction = RelaxedSignal(s.edges(), std::move(d), s.u());
  return r;
}

ThetaCertificate theta_certificates(const SwitchedProblem& problem, const RelaxedSignal& s,
                                    const VectorRef& x0, int k, double tol, int substeps) {
  ThetaCertificate cert;
  cert.theta = optimality_theta(problem, s, x0, substeps).theta;
  cert.nonpositive = cert.theta <= tol;
  cert.theta_projected = optimality_theta(problem, project_Rk(s, k), x0, substeps).theta;
  return cert;
}

}  // namespace swopt
