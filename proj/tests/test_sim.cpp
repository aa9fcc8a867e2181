#include "doctest.h"
#include "support.hpp"
#include "swopt/project.hpp"
#include "swopt/sim.hpp"

#include <cmath>

using namespace swopt;
using swopt::testing::Stream;

namespace {

VectorXd vec(double a, double b) { return (VectorXd(2) << a, b).finished(); }

RelaxedSignal half_half(const Grid& g) { return RelaxedSignal(g, MatrixXd::Constant(g.n, 2, 0.5)); }

Trajectory terminal_only(const VectorXd& x) {
  Trajectory t;
  t.edges = {0.0, 2.0};
  t.times = {0.0, 2.0};
  t.states = MatrixXd::Zero(x.size(), 2);
  t.states.col(1) = x;
  return t;
}

}  // namespace

TEST_CASE("analytic terminal states of the example") {
  const SwitchedProblem p = paper_example();
  const Grid g(2.0, 64);
  const Trajectory m1 = simulate(p, constant_mode_signal(g, 2, 0), p.x0);
  const Trajectory m2 = simulate(p, constant_mode_signal(g, 2, 1), p.x0);
  CHECK((m1.terminal() - vec(4, 0)).norm() <= 1e-9);
  CHECK((m2.terminal() - vec(0, 0)).norm() <= 1e-9);
  CHECK(m1.samples() == 64 * kDefaultSubsteps + 1);
  CHECK(m1.state(0) == p.x0);
  CHECK(m1.times.back() == 2.0);
}

TEST_CASE("blended signal against a fine-step reference") {
  // Solver default grid. Kink crossings inside a step are only second-order accurate,
  // so at N = 64 the gap is about 3e-6.
  const SwitchedProblem p = paper_example();
  const Grid g(2.0, 256);
  const VectorXd coarse = simulate(p, half_half(g), p.x0).terminal();
  const VectorXd fine = simulate(p, half_half(g), p.x0, 10 * kDefaultSubsteps).terminal();
  CHECK((coarse - fine).norm() <= 1e-6);
}

TEST_CASE("cost values") {
  const SwitchedProblem p = paper_example();
  CHECK(cost_J(p, terminal_only(vec(4, 0))) == doctest::Approx(2.2360679775).epsilon(1e-10));
  CHECK(cost_J(p, terminal_only(vec(3, 2))) == 0.0);
  CHECK(cost_J(p, terminal_only(vec(3, 1))) == 1.0);
}

TEST_CASE("psi") {
  SwitchedProblem p = paper_example();
  const Trajectory m1 = simulate(p, constant_mode_signal(Grid(2.0, 64), 2, 0), p.x0);
  CHECK_FALSE(psi(p, m1).has_value());
  p.constraints = {[](const VectorRef& x) { return x[0] - 3.0; }};
  CHECK(*psi(p, m1) == doctest::Approx(1.0).epsilon(1e-12));
  p.constraints = {[](const VectorRef& x) { return x[0] - 10.0; }};
  CHECK(*psi(p, m1) == doctest::Approx(-6.0).epsilon(1e-12));
  p.constraints = {[](const VectorRef& x) { return x[0] - 10.0; },
                   [](const VectorRef& x) { return -x[0]; }};
  CHECK(*psi(p, m1) == 0.0);
}

TEST_CASE("comparison function P") {
  CHECK(compare_P(Evaluation{2.0, {}}, Evaluation{1.0, {}}) == -1.0);
  CHECK(compare_P(Evaluation{1.0, -0.5}, Evaluation{0.7, -0.1}) == doctest::Approx(-0.1));
  CHECK(compare_P(Evaluation{1.0, 0.4}, Evaluation{5.0, 0.1}) == doctest::Approx(-0.3));

  const SwitchedProblem p = paper_example();
  Stream rng(31);
  const RelaxedSignal s = swopt::testing::structured_signal(rng, Grid(2.0, 32), 2);
  const Trajectory t = simulate(p, s, p.x0);
  CHECK(compare_P(p, t, t) == 0.0);
  SwitchedProblem c = p;
  c.constraints = {[](const VectorRef& x) { return x[1] - 0.5; }};
  CHECK(compare_P(c, t, t) <= 0.0);
}

TEST_CASE("pure signals: relaxed field equals direct mode switching") {
  const SwitchedProblem p = paper_example();
  Stream rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid g(2.0, 8 << (trial % 4));
    MatrixXd d = MatrixXd::Zero(g.n, 2);
    for (int c = 0; c < g.n; ++c) d(c, rng.index(2)) = 1.0;
    const PureSignal s{RelaxedSignal(g, d)};
    const Trajectory a = simulate(p, s, p.x0);
    const Trajectory b = simulate_pure_direct(p, s, p.x0);
    CHECK((a.states - b.states).cwiseAbs().maxCoeff() <= 1e-12);
  }
  // Non-uniform partitions from the projection as well.
  const PureSignal projected = project_Rk(half_half(Grid(2.0, 16)), 6);
  const Trajectory a = simulate(p, projected, p.x0);
  const Trajectory b = simulate_pure_direct(p, projected, p.x0);
  CHECK((a.states - b.states).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("RK4 order of accuracy") {
  // The example's kinks sit inside RK4 steps and cap the observed order, so the
  // convergence rate is measured on a smooth system.
  const SwitchedProblem p = swopt::testing::smooth_planar();
  Stream rng(33);
  const RelaxedSignal s = swopt::testing::random_signal(rng, Grid(2.0, 8), 2);
  const VectorXd ref = simulate(p, s, p.x0, 64).terminal();
  double prev = 0.0;
  for (int m : {1, 2, 4}) {
    const double err = (simulate(p, s, p.x0, m).terminal() - ref).norm();
    if (m > 1) {
      const double ratio = prev / err;
      CHECK(ratio >= 8.0);
      CHECK(ratio <= 32.0);
    }
    prev = err;
  }
}

TEST_CASE("simulate input checks and blowup") {
  const SwitchedProblem p = paper_example();
  const Grid g(2.0, 4);
  CHECK_THROWS_AS(simulate(p, half_half(g), p.x0, 0), std::invalid_argument);
  CHECK_THROWS_AS(simulate(p, half_half(Grid(1.0, 4)), p.x0), std::invalid_argument);
  CHECK_THROWS_AS(simulate(p, half_half(g), VectorXd::Zero(3)), std::invalid_argument);

  SwitchedProblem blow = swopt::testing::scalar_linear(1.0, 0.0);
  blow.modes[0] = [](double, const VectorRef& x, const VectorRef&, Eigen::Ref<VectorXd> out) {
    out[0] = x[0] * x[0] * 1e200;
  };
  const PureSignal one = constant_mode_signal(Grid(1.0, 4), 1, 0);
  try {
    simulate(blow, one, blow.x0);
    FAIL("expected a blowup");
  } catch (const IntegrationBlowup& e) {
    CHECK(e.cell() == 0);
  }
}
