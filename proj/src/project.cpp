#include "swopt/project.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace swopt {

PureSignal project_Rk(const RelaxedSignal& s, int k) {
  if (k < 1) throw std::invalid_argument("project_Rk: k must be >= 1");
  if (k > 52) throw std::invalid_argument("project_Rk: k = " + std::to_string(k) + " too large");
  const long cells = 1L << k;
  const double t_f = s.t_f();
  const double width = t_f / static_cast<double>(cells);
  if (width < 1e-12) {
    throw std::invalid_argument("project_Rk: pulse cells narrower than 1e-12 at k = " +
                                std::to_string(k) + "; use a coarser k");
  }
  const int n_sigma = s.n_sigma();
  std::vector<double> edges{0.0};
  std::vector<int> modes;
  std::vector<int> source_cell;
  edges.reserve(3 * cells + 1);
  auto emit = [&](double end, int mode, int src) {
    if (end > edges.back()) {
      edges.push_back(end);
      modes.push_back(mode);
      source_cell.push_back(src);
    }
  };

  for (long i = 0; i < cells; ++i) {
    const double a = static_cast<double>(i) * width;
    const double b = i + 1 == cells ? t_f : static_cast<double>(i + 1) * width;
    const VectorXd w = integrate_weights(s, a, b);
    const int src = s.cell_at(a);
    if (n_sigma == 2) {
      const double t1 = std::min(b, a + 0.5 * w[1]);
      const double t2 = std::min(b, t1 + w[0]);
      emit(t1, 1, src);
      emit(t2, 0, src);
      emit(b, 1, src);
    } else {
      double t = a;
      for (int m = 0; m < n_sigma; ++m) {
        t = m + 1 == n_sigma ? b : std::min(b, t + w[m]);
        emit(t, m, src);
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(modes.size());
  MatrixXd d = MatrixXd::Zero(n, n_sigma);
  MatrixXd u(n, s.n_u());
  for (Eigen::Index c = 0; c < n; ++c) {
    d(c, modes[c]) = 1.0;
    u.row(c) = s.u().row(source_cell[c]);
  }
  return PureSignal(RelaxedSignal(std::move(edges), std::move(d), std::move(u)));
}

std::pair<Trajectory, Trajectory> simulate_common(const SwitchedProblem& problem,
                                                  const RelaxedSignal& a, const RelaxedSignal& b,
                                                  const VectorRef& x0, int substeps) {
  if (a.same_partition(b)) {
    return {simulate(problem, a, x0, substeps), simulate(problem, b, x0, substeps)};
  }
  const auto edges = merge_edges(a.edges(), b.edges());
  return {simulate(problem, refine(a, edges), x0, substeps),
          simulate(problem, refine(b, edges), x0, substeps)};
}

double projection_error(const SwitchedProblem& problem, const RelaxedSignal& s, int k,
                        TopologyKind kind, const VectorRef& x0, int substeps) {
  const PureSignal projected = project_Rk(s, k);
  const auto [relaxed_traj, pure_traj] = simulate_common(problem, s, projected, x0, substeps);
  return topo_distance(kind, relaxed_traj, pure_traj);
}

KChoice adapt_k(const std::function<double(int)>& Q, double theta_p, const SolverConfig& cfg) {
  if (!(theta_p < 0.0)) throw std::invalid_argument("adapt_k: requires theta_p < 0");
  KChoice best;
  best.Q = std::numeric_limits<double>::infinity();
  const double bound = projection_bound(cfg.omega, cfg.gamma, theta_p);
  for (int k = cfg.k0; k <= cfg.k_max; ++k) {
    const double q = Q(k);
    if (q <= bound) return {k, q, bound};
    if (q < best.Q) best = {k, q, bound};
  }
  throw KSelectionError(best);
}

}  // namespace swopt
