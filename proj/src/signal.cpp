#include "swopt/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swopt {

Grid::Grid(double horizon, int cells) : t_f(horizon), n(cells) {
  if (cells < 1) throw std::invalid_argument("grid needs at least one cell");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("grid horizon must be positive");
  }
}

std::vector<double> Grid::edges() const {
  std::vector<double> e(n + 1);
  for (int i = 0; i <= n; ++i) e[i] = boundary(i);
  return e;
}

RelaxedSignal::RelaxedSignal(const Grid& grid, MatrixXd d, MatrixXd u)
    : RelaxedSignal(grid.edges(), std::move(d), std::move(u)) {}

RelaxedSignal::RelaxedSignal(std::vector<double> edges, MatrixXd d, MatrixXd u)
    : edges_(std::move(edges)), d_(std::move(d)), u_(std::move(u)) {
  if (u_.size() == 0) u_.resize(d_.rows(), 0);
  validate();
}

void RelaxedSignal::validate() const {
  if (edges_.size() < 2) throw std::invalid_argument("signal needs at least one cell");
  if (static_cast<Eigen::Index>(edges_.size()) != d_.rows() + 1) {
    throw std::invalid_argument("signal has " + std::to_string(d_.rows()) + " weight rows for " +
                                std::to_string(edges_.size() - 1) + " cells");
  }
  if (u_.rows() != d_.rows()) throw std::invalid_argument("input rows do not match cells");
  if (edges_.front() != 0.0) throw std::invalid_argument("signal must start at t = 0");
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    if (!(edges_[i + 1] > edges_[i])) {
      throw std::invalid_argument("signal boundaries must be strictly increasing");
    }
  }
  for (Eigen::Index c = 0; c < d_.rows(); ++c) {
    try {
      validate_simplex_point(d_.row(c).transpose());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("cell " + std::to_string(c) + ": " + e.what());
    }
  }
}

int RelaxedSignal::cell_at(double t) const {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
  int c = static_cast<int>(it - edges_.begin()) - 1;
  return std::clamp(c, 0, cells() - 1);
}

bool RelaxedSignal::same_partition(const RelaxedSignal& other) const {
  return edges_ == other.edges_ && n_sigma() == other.n_sigma() && n_u() == other.n_u();
}

void RelaxedSignal::check_input_box(const Box& box) const {
  if (n_u() == 0) return;
  for (int c = 0; c < cells(); ++c) {
    for (int j = 0; j < n_u(); ++j) {
      if (u_(c, j) < box.lower[j] || u_(c, j) > box.upper[j]) {
        throw std::invalid_argument("cell " + std::to_string(c) + ": input " + std::to_string(j) +
                                    " outside its box");
      }
    }
  }
}

PureSignal::PureSignal(RelaxedSignal s) : s_(std::move(s)) {
  if (!is_pure(s_, kVertexTol)) throw std::invalid_argument("signal is not vertex-valued");
}

int PureSignal::mode(int c) const {
  Eigen::Index i;
  s_.d().row(c).maxCoeff(&i);
  return static_cast<int>(i);
}

double l2_norm(const std::vector<double>& edges, const MatrixXd& rows) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < rows.rows(); ++c) {
    acc += rows.row(c).squaredNorm() * (edges[c + 1] - edges[c]);
  }
  return std::sqrt(acc);
}

double l2_norm(const RelaxedSignal& s) {
  MatrixXd rows(s.cells(), s.n_sigma() + s.n_u());
  rows << s.d(), s.u();
  return l2_norm(s.edges(), rows);
}

bool is_pure(const RelaxedSignal& s, double tol) {
  for (int c = 0; c < s.cells(); ++c) {
    const auto row = s.d().row(c);
    int ones = 0;
    for (Eigen::Index i = 0; i < row.size(); ++i) {
      if (std::abs(row[i] - 1.0) <= tol) {
        ++ones;
      } else if (std::abs(row[i]) > tol) {
        return false;
      }
    }
    if (ones != 1) return false;
  }
  return true;
}

RelaxedSignal convex_combine(const RelaxedSignal& a, const RelaxedSignal& b, double lambda) {
  if (!a.same_partition(b)) throw std::invalid_argument("convex_combine: partition mismatch");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("convex_combine: lambda outside [0, 1]");
  }
  if (lambda == 0.0) return a;
  if (lambda == 1.0) return b;
  MatrixXd d = (1.0 - lambda) * a.d() + lambda * b.d();
  // Renormalise rounding so rows stay on the simplex to machine precision.
  for (Eigen::Index c = 0; c < d.rows(); ++c) d.row(c) /= d.row(c).sum();
  MatrixXd u = (1.0 - lambda) * a.u() + lambda * b.u();
  return RelaxedSignal(a.edges(), std::move(d), std::move(u));
}

double signal_sup_distance(const RelaxedSignal& a, const RelaxedSignal& b) {
  if (!a.same_partition(b)) throw std::invalid_argument("signal_sup_distance: partition mismatch");
  return (a.d() - b.d()).rowwise().norm().maxCoeff();
}

PureSignal initial_signal_paper(const Grid& grid, double switch_time) {
  if (std::abs(grid.t_f - 2.0) > 1e-12) {
    throw std::invalid_argument("initial_signal_paper: horizon must be [0, 2]");
  }
  MatrixXd d = MatrixXd::Zero(grid.n, 2);
  for (int c = 0; c < grid.n; ++c) {
    const double mid = 0.5 * (grid.boundary(c) + grid.boundary(c + 1));
    d(c, 0) = mid <= switch_time ? 1.0 : 0.0;
    d(c, 1) = 1.0 - d(c, 0);
  }
  return PureSignal(RelaxedSignal(grid, std::move(d)));
}

PureSignal constant_mode_signal(const Grid& grid, int n_sigma, int mode, int n_u) {
  if (mode < 0 || mode >= n_sigma) throw std::invalid_argument("mode index out of range");
  MatrixXd d = MatrixXd::Zero(grid.n, n_sigma);
  d.col(mode).setOnes();
  return PureSignal(RelaxedSignal(grid, std::move(d), MatrixXd::Zero(grid.n, n_u)));
}

VectorXd integrate_weights(const RelaxedSignal& s, double a, double b) {
  VectorXd acc = VectorXd::Zero(s.n_sigma());
  if (!(b > a)) return acc;
  for (int c = s.cell_at(a); c < s.cells(); ++c) {
    const double lo = std::max(a, s.edges()[c]);
    const double hi = std::min(b, s.edges()[c + 1]);
    if (lo >= b) break;
    if (hi > lo) acc += (hi - lo) * s.weights(c);
  }
  return acc;
}

RelaxedSignal resample_average(const RelaxedSignal& s, const Grid& grid) {
  if (std::abs(s.t_f() - grid.t_f) > 1e-12 * grid.t_f) {
    throw std::invalid_argument("resample_average: horizon mismatch");
  }
  MatrixXd d(grid.n, s.n_sigma());
  MatrixXd u = MatrixXd::Zero(grid.n, s.n_u());
  for (int c = 0; c < grid.n; ++c) {
    const double a = grid.boundary(c);
    const double b = grid.boundary(c + 1);
    VectorXd w = integrate_weights(s, a, b);
    d.row(c) = (w / w.sum()).transpose();
    if (s.n_u() > 0) {
      for (int k = s.cell_at(a); k < s.cells() && s.edges()[k] < b; ++k) {
        const double lo = std::max(a, s.edges()[k]);
        const double hi = std::min(b, s.edges()[k + 1]);
        if (hi > lo) u.row(c) += (hi - lo) / (b - a) * s.u().row(k);
      }
    }
  }
  return RelaxedSignal(grid, std::move(d), std::move(u));
}

std::vector<double> merge_edges(const std::vector<double>& a, const std::vector<double>& b,
                                double merge_tol) {
  std::vector<double> all;
  all.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
  std::vector<double> out;
  out.reserve(all.size());
  const double t_f = std::max(a.back(), b.back());
  for (double t : all) {
    if (out.empty() || t - out.back() > merge_tol * std::max(1.0, t_f)) out.push_back(t);
  }
  out.back() = t_f;
  return out;
}

RelaxedSignal refine(const RelaxedSignal& s, const std::vector<double>& edges) {
  const int cells = static_cast<int>(edges.size()) - 1;
  MatrixXd d(cells, s.n_sigma());
  MatrixXd u(cells, s.n_u());
  for (int c = 0; c < cells; ++c) {
    const int src = s.cell_at(0.5 * (edges[c] + edges[c + 1]));
    d.row(c) = s.d().row(src);
    u.row(c) = s.u().row(src);
  }
  return RelaxedSignal(edges, std::move(d), std::move(u));
}

}  // namespace swopt
