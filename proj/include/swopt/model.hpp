#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace swopt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using VectorRef = Eigen::Ref<const VectorXd>;

/// Absolute tolerance on the simplex sum of a switching weight row.
inline constexpr double kSimplexTol = 1e-12;

/// Vector field of one mode: writes f_i(t, x, u) into `out`.
using ModeField = std::function<void(double t, const VectorRef& x, const VectorRef& u,
                                     Eigen::Ref<VectorXd> out)>;
/// State Jacobian of one mode: writes df_i/dx(t, x, u) into `out` (n_x by n_x).
using ModeJacobian = std::function<void(double t, const VectorRef& x, const VectorRef& u,
                                        Eigen::Ref<MatrixXd> out)>;
using ScalarFn = std::function<double(const VectorRef& x)>;

/// Gradient of the terminal cost. `kink` is set where the cost is not differentiable
/// and the zero vector was returned by convention.
struct CostGradient {
  VectorXd grad;
  bool kink = false;
};

struct TerminalCost {
  ScalarFn value;
  std::function<CostGradient(const VectorRef& x)> gradient;
};

struct Box {
  VectorXd lower;
  VectorXd upper;
};

/**
 * A switched system with n_sigma modes, a terminal cost h(x(t_f)) and optional
 * state constraints h_j(x(t)) <= 0.
 *
 * Instances are immutable after construction and may be shared across threads.
 */
struct SwitchedProblem {
  std::string name;
  int n_x = 0;
  int n_sigma = 0;
  int n_u = 0;
  double t_f = 0.0;
  VectorXd x0;  ///< default initial state
  std::vector<ModeField> modes;
  std::vector<ModeJacobian> mode_jacobians;
  TerminalCost cost;
  std::vector<ScalarFn> constraints;
  Box u_box;

  /// Throws std::invalid_argument when dimensions or counts are inconsistent.
  void validate() const;
};

/// Throws std::invalid_argument unless `d` is a point of the n-simplex.
void validate_simplex_point(const VectorRef& d, double tol = kSimplexTol);

/// sum_i d_i f_i(t, x, u).
VectorXd eval_relaxed_field(const SwitchedProblem& problem, double t, const VectorRef& x,
                            const VectorRef& u, const VectorRef& d);

/// Same as eval_relaxed_field without allocation or validation; used by the integrators.
void relaxed_field_into(const SwitchedProblem& problem, double t, const VectorRef& x,
                        const VectorRef& u, const VectorRef& d, Eigen::Ref<VectorXd> out,
                        Eigen::Ref<VectorXd> scratch);

/// sum_i d_i df_i/dx(t, x, u).
void relaxed_jacobian_into(const SwitchedProblem& problem, double t, const VectorRef& x,
                           const VectorRef& u, const VectorRef& d, Eigen::Ref<MatrixXd> out,
                           Eigen::Ref<MatrixXd> scratch);

CostGradient eval_cost_gradient(const SwitchedProblem& problem, const VectorRef& x);

// ---------------------------------------------------------------------------
// Piecewise scalar functions used by the built-in example.

/// One branch of a piecewise function: value and derivative on its interval.
struct Branch {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

/**
 * Piecewise function with breakpoints b_0 < ... < b_{m-1} and m+1 branches.
 * Branch j is active on [b_{j-1}, b_j), so derivatives at a breakpoint are
 * right-hand derivatives.
 */
class PiecewiseScalar {
 public:
  PiecewiseScalar(std::vector<double> breakpoints, std::vector<Branch> branches);

  double operator()(double x) const { return branches_[index(x)].value(x); }
  double derivative(double x) const { return branches_[index(x)].slope(x); }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  /// Value of the branch left of breakpoint j, evaluated at that breakpoint.
  double left_limit(std::size_t j) const;
  double right_limit(std::size_t j) const;
  /// Largest |left_limit - right_limit| over all breakpoints.
  double max_jump() const;

 private:
  std::size_t index(double x) const;

  std::vector<double> breakpoints_;
  std::vector<Branch> branches_;
};

/// Mode-1 rate of the example, a function of x_2. Below -1 the value is 0 (see README).
PiecewiseScalar make_q1();
/// Mode-2 rate of the example, a function of x_1.
PiecewiseScalar make_q2();

/// Target point A of the example cost.
VectorXd paper_target();

/// Two-mode example on [0, 2] with cost ||x(2) - (3, 2)||. The rate tables can be
/// replaced, which the verification suite uses for its sabotage check.
SwitchedProblem paper_example();
SwitchedProblem paper_example(PiecewiseScalar q1, PiecewiseScalar q2);

/// Terminal cost ||x - target||_2 with the zero gradient (flagged) at the kink.
TerminalCost distance_cost(VectorXd target);
/// Terminal cost ||x - target||^2 / 2.
TerminalCost quadratic_cost(VectorXd target);

/// Built-in problems by name; throws std::out_of_range for unknown names.
SwitchedProblem problem_by_name(const std::string& name);
std::vector<std::string> builtin_problem_names();

}  // namespace swopt
