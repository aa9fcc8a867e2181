#include "swopt/solver.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace swopt {

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("solver config: " + what); };
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (!(omega > 0.0 && omega < 1.0)) fail("omega must lie in (0, 1)");
  if (!(gamma >= 0.0)) fail("gamma must be >= 0");
  if (k0 < 1 || k_max < k0) fail("need 1 <= k0 <= k_max");
  if (fixed_k && *fixed_k < 1) fail("fixed_k must be >= 1");
  if (l_max < 1) fail("l_max must be >= 1");
  if (!(armijo_alpha > 0.0 && armijo_alpha < 1.0)) fail("armijo_alpha must lie in (0, 1)");
  if (!(armijo_beta > 0.0 && armijo_beta < 1.0)) fail("armijo_beta must lie in (0, 1)");
  if (max_iter < 0) fail("max_iter must be >= 0");
  if (N < 1) fail("N must be >= 1");
  if (substeps < 1) fail("substeps must be >= 1");
  if (!(stall_floor >= 0.0)) fail("stall_floor must be >= 0");
  if (!(neighborhood_radius >= 0.0)) fail("neighborhood_radius must be >= 0");
  if (probe_cells < 0) fail("probe_cells must be >= 0");
}

StepResult gamma_hat_step(const SwitchedProblem& problem, const RelaxedSignal& s,
                          const VectorRef& x0, const SolverConfig& cfg) {
  const ThetaResult th = optimality_theta(problem, s, x0, cfg.substeps);
  StepResult r{s, th.theta, 0.0, th.J, th.J, false};
  if (!(th.theta < 0.0)) return r;
  for (double lambda = 1.0; lambda >= 1e-12; lambda *= cfg.armijo_beta) {
    RelaxedSignal trial = convex_combine(s, th.direction, lambda);
    const double J = cost_J(problem, simulate(problem, trial, x0, cfg.substeps));
    if (J - th.J <= cfg.armijo_alpha * lambda * th.theta) {
      r.signal = std::move(trial);
      r.lambda = lambda;
      r.J_after = J;
      r.progressed = true;
      return r;
    }
  }
  return r;
}

GammaRResult gamma_r(const SwitchedProblem& problem, const RelaxedSignal& s, const VectorRef& x0,
                     const SolverConfig& cfg) {
  GammaRResult r;
  r.signal = s;
  const Trajectory traj = simulate(problem, s, x0, cfg.substeps);
  r.J_start = cost_J(problem, traj);
  r.Psi_start = psi(problem, traj);
  r.J_end = r.J_start;
  r.Psi_end = r.Psi_start;
  bool first = true;
  for (int l = 1; l <= cfg.l_max; ++l) {
    StepResult step = gamma_hat_step(problem, r.signal, x0, cfg);
    if (first) {
      r.theta = step.theta;
      first = false;
    }
    r.l = l;
    if (!step.progressed) {
      r.flagged = !(r.J_end - r.J_start <= cfg.gamma * r.theta);
      break;
    }
    r.signal = std::move(step.signal);
    r.J_end = step.J_after;
    r.J_steps.push_back(step.J_after);
    if (r.J_end - r.J_start <= cfg.gamma * r.theta) {
      r.flagged = false;
      break;
    }
    r.flagged = true;
  }
  if (!problem.constraints.empty()) {
    r.Psi_end = psi(problem, simulate(problem, r.signal, x0, cfg.substeps));
  }
  return r;
}

QFunction::QFunction(const SwitchedProblem& problem, const RelaxedSignal& s, const VectorRef& x0,
                     const SolverConfig& cfg)
    : QFunction(problem, gamma_r(problem, s, x0, cfg),
                evaluate(problem, simulate(problem, s, x0, cfg.substeps)), x0, cfg) {}

QFunction::QFunction(const SwitchedProblem& problem, GammaRResult inner, Evaluation at_xi,
                     const VectorRef& x0, const SolverConfig& cfg)
    : problem_(problem),
      inner_(std::move(inner)),
      at_xi_(at_xi),
      at_inner_{inner_.J_end, inner_.Psi_end},
      x0_(x0),
      cfg_(cfg) {}

double QFunction::operator()(int k) const {
  last_projection_.emplace(project_Rk(inner_.signal, k));
  const Evaluation projected =
      evaluate(problem_, simulate(problem_, *last_projection_, x0_, cfg_.substeps));
  last_eval_ = projected;
  const double dJ = projected.J - at_inner_.J;
  if (!at_xi_.Psi) return dJ;
  const double dPsi = *projected.Psi - *at_inner_.Psi;
  return *at_xi_.Psi <= 0.0 ? std::max(dJ, dPsi) : dPsi;
}

double Q_function(const SwitchedProblem& problem, const RelaxedSignal& s, int k,
                  const VectorRef& x0, const SolverConfig& cfg) {
  return QFunction(problem, s, x0, cfg)(k);
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Stationary:
      return "Stationary";
    case SolveStatus::Stalled:
      return "Stalled";
    case SolveStatus::MaxIter:
      break;
  }
  return "MaxIter";
}

namespace {

MatrixXd lattice_weights(long index, int cells, int n_sigma) {
  MatrixXd d = MatrixXd::Zero(cells, n_sigma);
  for (int c = cells - 1; c >= 0; --c) {
    d(c, index % n_sigma) = 1.0;
    index /= n_sigma;
  }
  return d;
}

}  // namespace

NeighborhoodProbe::NeighborhoodProbe(const SwitchedProblem& problem, const VectorRef& x0,
                                     int cells, int substeps, long budget)
    : problem_(problem), x0_(x0), lattice_(problem.t_f, cells), substeps_(substeps) {
  const double total = std::pow(static_cast<double>(problem.n_sigma), cells);
  if (total > static_cast<double>(budget)) {
    throw std::invalid_argument("neighborhood probe: " + std::to_string(problem.n_sigma) + "^" +
                                std::to_string(cells) + " lattice signals exceed the budget");
  }
  const long count = static_cast<long>(total);
  evals_.reserve(count);
  terminals_.resize(problem.n_x, count);
  for (long i = 0; i < count; ++i) {
    const Trajectory traj = simulate(problem, candidate(i), x0, substeps);
    evals_.push_back(evaluate(problem, traj));
    terminals_.col(i) = traj.terminal();
  }
}

PureSignal NeighborhoodProbe::candidate(long index) const {
  return PureSignal(RelaxedSignal(lattice_, lattice_weights(index, lattice_.n, problem_.n_sigma),
                                  MatrixXd::Zero(lattice_.n, problem_.n_u)));
}

std::optional<long> NeighborhoodProbe::nearest_improving(TopologyKind kind,
                                                         const Trajectory& traj,
                                                         const Evaluation& at, double radius,
                                                         const Grid& layout) const {
  std::optional<long> best;
  double best_dist = 0.0;
  for (long i = 0; i < size(); ++i) {
    if (!(compare_P(at, evals_[i]) < -1e-12)) continue;
    double dist = 0.0;
    if (kind == TopologyKind::TerminalState) {
      dist = (terminals_.col(i) - traj.terminal()).norm();
    } else {
      const RelaxedSignal on_layout = refine(candidate(i), layout.edges());
      dist = topo_distance(kind, simulate(problem_, on_layout, x0_, substeps_), traj);
    }
    if (dist > radius) continue;
    if (!best || dist < best_dist ||
        (dist == best_dist && evals_[i].J < evals_[*best].J)) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

SolveResult solve(const SwitchedProblem& problem, const VectorRef& x0, const PureSignal& s0,
                  const SolverConfig& cfg) {
  problem.validate();
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  const Grid grid(problem.t_f, cfg.N);

  SolveResult result{s0, {}, SolveStatus::MaxIter};
  std::optional<NeighborhoodProbe> probe;
  int quiet_iterations = 0;
  for (int iter = 0;; ++iter) {
    const auto started = Clock::now();
    const RelaxedSignal& xi = result.solution;
    const ThetaResult th = optimality_theta(problem, xi, x0, cfg.substeps);

    IterationRecord rec;
    rec.iter = iter;
    rec.J = th.J;
    rec.theta = th.theta;
    rec.Psi = psi(problem, th.traj);
    rec.terminal = th.traj.terminal();

    auto finish = [&](SolveStatus status) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
      result.history.push_back(std::move(rec));
      result.status = status;
    };
    if (th.theta > -cfg.epsilon) {
      finish(SolveStatus::Stationary);
      break;
    }
    if (iter >= cfg.max_iter) {
      finish(SolveStatus::MaxIter);
      break;
    }

    const RelaxedSignal descent_start =
        xi.edges() == grid.edges() ? xi : resample_average(xi, grid);
    const QFunction Q(problem, gamma_r(problem, descent_start, x0, cfg), {th.J, rec.Psi}, x0, cfg);
    const GammaRResult& inner = Q.inner();
    rec.l_used = inner.l;
    rec.l_flagged = inner.flagged;
    rec.theta_r = inner.theta;
    rec.descent = inner.J_end - inner.J_start;
    rec.projection_bound = projection_bound(cfg.omega, cfg.gamma, th.theta);

    std::optional<PureSignal> next;
    if (inner.J_steps.empty() && cfg.probe_cells > 0) {
      if (!probe) probe.emplace(problem, x0, cfg.probe_cells, cfg.substeps);
      const Trajectory at = simulate(problem, descent_start, x0, cfg.substeps);
      if (auto hit = probe->nearest_improving(cfg.topology, at, {th.J, rec.Psi},
                                              cfg.neighborhood_radius, grid)) {
        next = probe->candidate(*hit);
        rec.neighborhood_move = true;
      }
    }
    if (!next) {
      if (cfg.fixed_k) {
        rec.k_used = *cfg.fixed_k;
        rec.Q_value = Q(rec.k_used);
        rec.k_flagged = !(rec.Q_value <= rec.projection_bound);
      } else {
        try {
          const KChoice choice = adapt_k(std::cref(Q), th.theta, cfg);
          rec.k_used = choice.k;
          rec.Q_value = choice.Q;
        } catch (const KSelectionError&) {
          rec.k_used = cfg.k_max;
          rec.Q_value = Q(cfg.k_max);
          rec.k_flagged = true;
        }
      }
      // The last Q evaluation was at k_used, so its projection is the next iterate.
      next = *Q.last_projection();
    }

    if (cfg.topology == TopologyKind::FullTrajectory) {
      const auto [a, b] = simulate_common(problem, xi, *next, x0, cfg.substeps);
      rec.trajectory_change = topo_distance(TopologyKind::FullTrajectory, a, b);
      quiet_iterations = rec.trajectory_change < cfg.stall_floor ? quiet_iterations + 1 : 0;
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
    result.history.push_back(std::move(rec));
    result.solution = std::move(*next);
    if (quiet_iterations >= 3) {
      const ThetaResult last = optimality_theta(problem, result.solution, x0, cfg.substeps);
      IterationRecord tail;
      tail.iter = iter + 1;
      tail.J = last.J;
      tail.theta = last.theta;
      tail.Psi = psi(problem, last.traj);
      tail.terminal = last.traj.terminal();
      result.history.push_back(std::move(tail));
      result.status = SolveStatus::Stalled;
      break;
    }
  }
  return result;
}

OracleResult oracle_enumerate(const SwitchedProblem& problem, const VectorRef& x0,
                              const Grid& coarse, long budget, int substeps) {
  const double total = std::pow(static_cast<double>(problem.n_sigma), coarse.n);
  if (total > static_cast<double>(budget)) {
    throw std::invalid_argument("oracle_enumerate: " + std::to_string(problem.n_sigma) + "^" +
                                std::to_string(coarse.n) + " candidates exceed the budget");
  }
  const long count = static_cast<long>(total);
  std::vector<int> digits(coarse.n, 0);
  MatrixXd d(coarse.n, problem.n_sigma);
  std::optional<OracleResult> best;
  // Candidates are visited in lexicographic order of the mode sequence, so keeping the
  // first strict minimum implements the tie-break.
  for (long idx = 0; idx < count; ++idx) {
    d.setZero();
    for (int c = 0; c < coarse.n; ++c) d(c, digits[c]) = 1.0;
    RelaxedSignal candidate(coarse, d, MatrixXd::Zero(coarse.n, problem.n_u));
    const double J = cost_J(problem, simulate(problem, candidate, x0, substeps));
    if (!best || J < best->best_cost) best = OracleResult{PureSignal(candidate), J, 0};
    for (int c = coarse.n - 1; c >= 0; --c) {
      if (++digits[c] < problem.n_sigma) break;
      digits[c] = 0;
    }
  }
  best->candidates = count;
  return *best;
}

}  // namespace swopt
