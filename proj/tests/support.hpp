#pragma once

#include "swopt/model.hpp"
#include "swopt/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace swopt::testing {

// Uniform doubles from a seeded 64-bit Mersenne twister. Built by hand so the values
// do not depend on the standard library's distribution implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int index(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 rng_;
};

inline VectorXd simplex_point(Stream& rng, int n) {
  VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = -std::log(1.0 - rng.uniform());
  return w / w.sum();
}

// Mixture of vertex runs, constant blends and free cells, so trajectories cross
// kinks, ride them and move in the interior.
inline RelaxedSignal structured_signal(Stream& rng, const Grid& grid, int n_sigma) {
  MatrixXd d(grid.n, n_sigma);
  int c = 0;
  while (c < grid.n) {
    const int run = 1 + rng.index(std::max(1, grid.n / 4));
    const int kind = rng.index(3);
    VectorXd row = simplex_point(rng, n_sigma);
    if (kind == 0) row = VectorXd::Unit(n_sigma, rng.index(n_sigma));
    for (int j = 0; j < run && c < grid.n; ++j, ++c) {
      d.row(c) = (kind == 2 ? simplex_point(rng, n_sigma) : row).transpose();
    }
  }
  return RelaxedSignal(grid, d);
}

inline RelaxedSignal random_signal(Stream& rng, const Grid& grid, int n_sigma) {
  MatrixXd d(grid.n, n_sigma);
  for (int c = 0; c < grid.n; ++c) d.row(c) = simplex_point(rng, n_sigma).transpose();
  return RelaxedSignal(grid, d);
}

// Vertex signal on `grid` from a mode string such as "11222211".
inline PureSignal modes_signal(const Grid& grid, const char* modes) {
  const int n = static_cast<int>(std::char_traits<char>::length(modes));
  MatrixXd d = MatrixXd::Zero(grid.n, 2);
  for (int c = 0; c < grid.n; ++c) d(c, modes[c * n / grid.n] - '1') = 1.0;
  return PureSignal(RelaxedSignal(grid, d));
}

inline TerminalCost zero_cost(int n_x) {
  TerminalCost cost;
  cost.value = [](const VectorRef&) { return 0.0; };
  cost.gradient = [n_x](const VectorRef&) { return CostGradient{VectorXd::Zero(n_x), false}; };
  return cost;
}

// x' = a x for every mode, quadratic terminal cost about `target`.
inline SwitchedProblem scalar_linear(double a, double target, int n_sigma = 1) {
  SwitchedProblem p;
  p.name = "scalar_linear";
  p.n_x = 1;
  p.n_sigma = n_sigma;
  p.t_f = 1.0;
  p.x0 = VectorXd::Ones(1);
  for (int i = 0; i < n_sigma; ++i) {
    p.modes.push_back([a](double, const VectorRef& x, const VectorRef&, Eigen::Ref<VectorXd> out) {
      out[0] = a * x[0];
    });
    p.mode_jacobians.push_back(
        [a](double, const VectorRef&, const VectorRef&, Eigen::Ref<MatrixXd> out) {
          out(0, 0) = a;
        });
  }
  p.cost = quadratic_cost(VectorXd::Constant(1, target));
  return p;
}

// Smooth two-mode planar system: a pendulum and a damped rotation.
inline SwitchedProblem smooth_planar() {
  SwitchedProblem p;
  p.name = "smooth_planar";
  p.n_x = 2;
  p.n_sigma = 2;
  p.t_f = 2.0;
  p.x0 = (VectorXd(2) << 1.0, 0.0).finished();
  p.modes = {
      [](double, const VectorRef& x, const VectorRef&, Eigen::Ref<VectorXd> out) {
        out << x[1], -std::sin(x[0]);
      },
      [](double, const VectorRef& x, const VectorRef&, Eigen::Ref<VectorXd> out) {
        out << -0.5 * x[0] - x[1], x[0] - 0.5 * x[1] * x[1];
      }};
  p.mode_jacobians = {
      [](double, const VectorRef& x, const VectorRef&, Eigen::Ref<MatrixXd> out) {
        out << 0.0, 1.0, -std::cos(x[0]), 0.0;
      },
      [](double, const VectorRef& x, const VectorRef&, Eigen::Ref<MatrixXd> out) {
        out << -0.5, -1.0, 1.0, -x[1];
      }};
  p.cost = quadratic_cost((VectorXd(2) << 0.0, 1.0).finished());
  return p;
}

// Two integrators, one per mode: mode 1 moves x1, mode 2 moves x2.
inline SwitchedProblem two_integrators(VectorXd target) {
  SwitchedProblem p;
  p.name = "two_integrators";
  p.n_x = 2;
  p.n_sigma = 2;
  p.t_f = 2.0;
  p.x0 = VectorXd::Zero(2);
  p.modes = {[](double, const VectorRef&, const VectorRef&, Eigen::Ref<VectorXd> out) {
               out << 1.0, 0.0;
             },
             [](double, const VectorRef&, const VectorRef&, Eigen::Ref<VectorXd> out) {
               out << 0.0, 1.0;
             }};
  p.mode_jacobians = {
      [](double, const VectorRef&, const VectorRef&, Eigen::Ref<MatrixXd> out) { out.setZero(); },
      [](double, const VectorRef&, const VectorRef&, Eigen::Ref<MatrixXd> out) { out.setZero(); }};
  p.cost = quadratic_cost(std::move(target));
  return p;
}

}  // namespace swopt::testing
