#include "swopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swopt {

void SwitchedProblem::validate() const {
  if (n_x < 1) throw std::invalid_argument("problem '" + name + "': n_x must be >= 1");
  if (n_sigma < 1) throw std::invalid_argument("problem '" + name + "': n_sigma must be >= 1");
  if (n_u < 0) throw std::invalid_argument("problem '" + name + "': n_u must be >= 0");
  if (!(t_f > 0.0) || !std::isfinite(t_f)) {
    throw std::invalid_argument("problem '" + name + "': t_f must be positive");
  }
  if (static_cast<int>(modes.size()) != n_sigma ||
      static_cast<int>(mode_jacobians.size()) != n_sigma) {
    throw std::invalid_argument("problem '" + name + "': expected one field and Jacobian per mode");
  }
  if (x0.size() != n_x) throw std::invalid_argument("problem '" + name + "': x0 has wrong size");
  if (!cost.value || !cost.gradient) {
    throw std::invalid_argument("problem '" + name + "': missing terminal cost");
  }
  if (n_u > 0 && (u_box.lower.size() != n_u || u_box.upper.size() != n_u)) {
    throw std::invalid_argument("problem '" + name + "': u_box has wrong size");
  }
}

void validate_simplex_point(const VectorRef& d, double tol) {
  if (d.size() < 1) throw std::invalid_argument("simplex point is empty");
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] >= -tol && d[i] <= 1.0 + tol)) {
      throw std::invalid_argument("simplex weight " + std::to_string(i) + " = " +
                                  std::to_string(d[i]) + " outside [0, 1]");
    }
  }
  if (std::abs(d.sum() - 1.0) > tol) {
    throw std::invalid_argument("simplex weights sum to " + std::to_string(d.sum()));
  }
}

VectorXd eval_relaxed_field(const SwitchedProblem& problem, double t, const VectorRef& x,
                            const VectorRef& u, const VectorRef& d) {
  if (x.size() != problem.n_x) throw std::invalid_argument("state has wrong dimension");
  if (u.size() != problem.n_u) throw std::invalid_argument("input has wrong dimension");
  if (d.size() != problem.n_sigma) throw std::invalid_argument("weights have wrong dimension");
  validate_simplex_point(d);
  VectorXd out(problem.n_x);
  VectorXd scratch(problem.n_x);
  relaxed_field_into(problem, t, x, u, d, out, scratch);
  return out;
}

void relaxed_field_into(const SwitchedProblem& problem, double t, const VectorRef& x,
                        const VectorRef& u, const VectorRef& d, Eigen::Ref<VectorXd> out,
                        Eigen::Ref<VectorXd> scratch) {
  out.setZero();
  for (int i = 0; i < problem.n_sigma; ++i) {
    if (d[i] == 0.0) continue;
    problem.modes[i](t, x, u, scratch);
    out.noalias() += d[i] * scratch;
  }
}

void relaxed_jacobian_into(const SwitchedProblem& problem, double t, const VectorRef& x,
                           const VectorRef& u, const VectorRef& d, Eigen::Ref<MatrixXd> out,
                           Eigen::Ref<MatrixXd> scratch) {
  out.setZero();
  for (int i = 0; i < problem.n_sigma; ++i) {
    if (d[i] == 0.0) continue;
    problem.mode_jacobians[i](t, x, u, scratch);
    out.noalias() += d[i] * scratch;
  }
}

CostGradient eval_cost_gradient(const SwitchedProblem& problem, const VectorRef& x) {
  if (x.size() != problem.n_x) throw std::invalid_argument("state has wrong dimension");
  return problem.cost.gradient(x);
}

// ---------------------------------------------------------------------------

PiecewiseScalar::PiecewiseScalar(std::vector<double> breakpoints, std::vector<Branch> branches)
    : breakpoints_(std::move(breakpoints)), branches_(std::move(branches)) {
  if (branches_.size() != breakpoints_.size() + 1) {
    throw std::invalid_argument("piecewise function needs one more branch than breakpoints");
  }
  if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end()) ||
      std::adjacent_find(breakpoints_.begin(), breakpoints_.end()) != breakpoints_.end()) {
    throw std::invalid_argument("breakpoints must be strictly increasing");
  }
}

std::size_t PiecewiseScalar::index(double x) const {
  return static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin());
}

double PiecewiseScalar::left_limit(std::size_t j) const {
  return branches_.at(j).value(breakpoints_.at(j));
}

double PiecewiseScalar::right_limit(std::size_t j) const {
  return branches_.at(j + 1).value(breakpoints_.at(j));
}

double PiecewiseScalar::max_jump() const {
  double jump = 0.0;
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    jump = std::max(jump, std::abs(left_limit(j) - right_limit(j)));
  }
  return jump;
}

namespace {

Branch affine(double offset, double slope) {
  return {[=](double x) { return offset + slope * x; }, [=](double) { return slope; }};
}

}  // namespace

PiecewiseScalar make_q1() {
  // Zero only below -1, so q1 stays continuous at -1 and 0 (see README).
  return PiecewiseScalar(
      {-1.0, 0.0, 0.5, 1.0, 2.0},
      {affine(0.0, 0.0), affine(2.0, 2.0), affine(2.0, -4.0), affine(-2.0, 4.0),
       Branch{[](double x) { return 4.0 / (3.0 - x); },
              [](double x) { return 4.0 / ((3.0 - x) * (3.0 - x)); }},
       affine(4.0, 0.0)});
}

PiecewiseScalar make_q2() {
  return PiecewiseScalar({0.0, 1.0, 2.0, 3.0, 4.0},
                         {affine(0.0, 0.0), affine(0.0, 2.0), affine(4.0, -2.0),
                          affine(-4.0, 2.0), affine(8.0, -2.0), affine(0.0, 0.0)});
}

VectorXd paper_target() { return (VectorXd(2) << 3.0, 2.0).finished(); }

TerminalCost distance_cost(VectorXd target) {
  TerminalCost cost;
  cost.value = [target](const VectorRef& x) { return (x - target).norm(); };
  cost.gradient = [target](const VectorRef& x) {
    CostGradient g;
    const VectorXd r = x - target;
    const double n = r.norm();
    if (n == 0.0) {
      g.grad = VectorXd::Zero(r.size());
      g.kink = true;
    } else {
      g.grad = r / n;
    }
    return g;
  };
  return cost;
}

TerminalCost quadratic_cost(VectorXd target) {
  TerminalCost cost;
  cost.value = [target](const VectorRef& x) { return 0.5 * (x - target).squaredNorm(); };
  cost.gradient = [target](const VectorRef& x) { return CostGradient{x - target, false}; };
  return cost;
}

SwitchedProblem paper_example() { return paper_example(make_q1(), make_q2()); }

SwitchedProblem paper_example(PiecewiseScalar q1, PiecewiseScalar q2) {
  SwitchedProblem p;
  p.name = "paper_example";
  p.n_x = 2;
  p.n_sigma = 2;
  p.n_u = 0;
  p.t_f = 2.0;
  p.x0 = VectorXd::Zero(2);
  p.modes = {
      [q1](double, const VectorRef& x, const VectorRef&, Eigen::Ref<VectorXd> out) {
        out[0] = q1(x[1]);
        out[1] = 0.0;
      },
      [q2](double, const VectorRef& x, const VectorRef&, Eigen::Ref<VectorXd> out) {
        out[0] = 0.0;
        out[1] = q2(x[0]);
      }};
  p.mode_jacobians = {
      [q1](double, const VectorRef& x, const VectorRef&, Eigen::Ref<MatrixXd> out) {
        out << 0.0, q1.derivative(x[1]), 0.0, 0.0;
      },
      [q2](double, const VectorRef& x, const VectorRef&, Eigen::Ref<MatrixXd> out) {
        out << 0.0, 0.0, q2.derivative(x[0]), 0.0;
      }};
  p.cost = distance_cost(paper_target());
  return p;
}

SwitchedProblem problem_by_name(const std::string& name) {
  if (name == "paper_example") return paper_example();
  throw std::out_of_range("unknown problem '" + name + "'");
}

std::vector<std::string> builtin_problem_names() { return {"paper_example"}; }

}  // namespace swopt
