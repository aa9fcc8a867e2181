#include "doctest.h"
#include "support.hpp"
#include "swopt/adjoint.hpp"

#include <cmath>

using namespace swopt;
using swopt::testing::Stream;

namespace {

VectorXd vec(double a, double b) { return (VectorXd(2) << a, b).finished(); }

struct Pair {
  RelaxedSignal xi, other;
};

// Interior-valued pairs: trajectories cross the kinks of q1, q2 transversally.
std::vector<Pair> random_pairs(int count, int cells, std::uint64_t seed) {
  Stream rng(seed);
  std::vector<Pair> out;
  const Grid g(2.0, cells);
  for (int i = 0; i < count; ++i) {
    RelaxedSignal a = swopt::testing::random_signal(rng, g, 2);
    RelaxedSignal b = swopt::testing::random_signal(rng, g, 2);
    out.push_back({std::move(a), std::move(b)});
  }
  return out;
}

double dj(const SwitchedProblem& p, const RelaxedSignal& xi, const MatrixXd& eta) {
  const Trajectory t = simulate(p, xi, p.x0);
  return directional_derivative_J(p, t, integrate_costate(p, t, xi), xi, eta);
}

double fd(const SwitchedProblem& p, const RelaxedSignal& xi, const RelaxedSignal& other,
          double lambda) {
  const double j0 = cost_J(p, simulate(p, xi, p.x0));
  return (cost_J(p, simulate(p, convex_combine(xi, other, lambda), p.x0)) - j0) / lambda;
}

}  // namespace

TEST_CASE("zero cost gives a zero costate and theta") {
  SwitchedProblem p = paper_example();
  p.cost = swopt::testing::zero_cost(2);
  Stream rng(41);
  const RelaxedSignal s = swopt::testing::random_signal(rng, Grid(2.0, 16), 2);
  const Trajectory t = simulate(p, s, p.x0);
  CHECK(integrate_costate(p, t, s).costates.norm() == 0.0);
  const ThetaResult th = optimality_theta(p, s, p.x0);
  CHECK(th.theta == 0.0);
  // All integrals tie at 0, so every cell picks mode 1.
  CHECK(th.direction.d().col(0).minCoeff() == 1.0);
}

TEST_CASE("mode-2 costate on the frozen example trajectory") {
  const SwitchedProblem p = paper_example();
  const PureSignal s = constant_mode_signal(Grid(2.0, 64), 2, 1);
  const Trajectory t = simulate(p, s, p.x0);
  const CostateTrajectory c = integrate_costate(p, t, s);
  // p(t_f) = ((0,0) - A)/|A|; dp1/dt = -q2'(0) p2 = -2 p2, dp2/dt = 0.
  const VectorXd pf = vec(-3, -2) / std::sqrt(13.0);
  CHECK((c.costate(t.samples() - 1) - pf).norm() <= 1e-12);
  for (int j = 0; j < t.samples(); ++j) {
    const double p1 = pf[0] + 2.0 * pf[1] * (2.0 - t.times[j]);
    CHECK(std::abs(c.costate(j)[0] - p1) <= 1e-8);
    CHECK(std::abs(c.costate(j)[1] - pf[1]) <= 1e-12);
  }
}

TEST_CASE("scalar linear adjoint matches the exponential") {
  const double a = -0.7;
  const SwitchedProblem p = swopt::testing::scalar_linear(a, 0.25);
  const PureSignal s = constant_mode_signal(Grid(1.0, 50), 1, 0);
  const Trajectory t = simulate(p, s, p.x0);
  const CostateTrajectory c = integrate_costate(p, t, s);
  const double grad = t.terminal()[0] - 0.25;
  for (int j = 0; j < t.samples(); ++j) {
    CHECK(std::abs(c.costate(j)[0] - std::exp(a * (1.0 - t.times[j])) * grad) <= 1e-8);
  }
}

TEST_CASE("directional derivative: zero and linearity") {
  const SwitchedProblem p = paper_example();
  for (const Pair& pr : random_pairs(5, 32, 42)) {
    const MatrixXd eta = pr.other.d() - pr.xi.d();
    CHECK(dj(p, pr.xi, MatrixXd::Zero(32, 2)) == 0.0);
    const double base = dj(p, pr.xi, eta);
    CHECK(std::abs(dj(p, pr.xi, 2.5 * eta) - 2.5 * base) <= 1e-12 * std::max(1.0, std::abs(base)));
  }
  CHECK_THROWS_AS(dj(p, random_pairs(1, 32, 1)[0].xi, MatrixXd::Zero(31, 2)),
                  std::invalid_argument);
}

TEST_CASE("directional derivative against finite differences") {
  const SwitchedProblem p = paper_example();
  for (const Pair& pr : random_pairs(10, 64, 43)) {
    const double d = dj(p, pr.xi, pr.other.d() - pr.xi.d());
    const double f = fd(p, pr.xi, pr.other, 1e-5);
    CHECK(std::abs(d - f) / std::max(1.0, std::abs(d)) <= 1e-3);

    // First-order convergence: the gap shrinks about tenfold per decade of lambda.
    const double e3 = std::abs(fd(p, pr.xi, pr.other, 1e-3) - d);
    const double e4 = std::abs(fd(p, pr.xi, pr.other, 1e-4) - d);
    const double e5 = std::abs(fd(p, pr.xi, pr.other, 1e-5) - d);
    CHECK(e3 / e4 >= 10.0 / 3.0);
    CHECK(e3 / e4 <= 30.0);
    CHECK(e4 / e5 >= 10.0 / 3.0);
    CHECK(e4 / e5 <= 30.0);
  }
}

TEST_CASE("theta is the exhaustive minimum over vertex directions") {
  const SwitchedProblem p = paper_example();
  const Grid g(2.0, 8);
  Stream rng(44);
  std::vector<RelaxedSignal> signals{resample_average(initial_signal_paper(Grid(2.0, 64)), g)};
  for (int i = 0; i < 5; ++i) signals.push_back(swopt::testing::structured_signal(rng, g, 2));
  for (const RelaxedSignal& s : signals) {
    const ThetaResult th = optimality_theta(p, s, p.x0);
    double best = INFINITY;
    for (int idx = 0; idx < 256; ++idx) {
      MatrixXd v = MatrixXd::Zero(8, 2);
      for (int c = 0; c < 8; ++c) v(c, (idx >> (7 - c)) & 1) = 1.0;
      best = std::min(best, directional_derivative_J(p, th.traj, th.costate, s, v - s.d()));
    }
    CHECK(std::abs(th.theta - best) <= 1e-10);
    CHECK(is_pure(th.direction, 0.0));
  }
  CHECK(optimality_theta(p, signals[0], p.x0).theta < 0.0);
}

TEST_CASE("theta is nonpositive") {
  const SwitchedProblem p = paper_example();
  Stream rng(45);
  for (int i = 0; i < 100; ++i) {
    const RelaxedSignal s = swopt::testing::structured_signal(rng, Grid(2.0, 16 << (i % 3)), 2);
    const ThetaCertificate cert = theta_certificates(p, s, p.x0, 6);
    CHECK(cert.nonpositive);
    CHECK(cert.theta_projected <= 1e-10);
  }
}

TEST_CASE("theta certificates at known points") {
  const SwitchedProblem p = paper_example();
  const Grid g(2.0, 256);
  CHECK(theta_certificates(p, initial_signal_paper(g), p.x0, 8).theta < -1e-6);
  // Mode 1, mode 2, mode 1 on [0, .5), [.5, 1.5), [1.5, 2) ends exactly at A.
  const PureSignal optimum = swopt::testing::modes_signal(g, "11222211");
  const ThetaResult th = optimality_theta(p, optimum, p.x0);
  CHECK(th.J == 0.0);
  CHECK(th.costate.terminal_kink);
  CHECK(th.theta <= 0.0);
  CHECK(th.theta >= -1e-10);
}
