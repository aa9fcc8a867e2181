#pragma once

#include "swopt/model.hpp"

#include <Eigen/Core>

#include <vector>

namespace swopt {

/// Uniform partition of [0, t_f] into n cells.
struct Grid {
  double t_f = 0.0;
  int n = 0;

  Grid(double horizon, int cells);

  double dt() const { return t_f / n; }
  /// Boundary i in 0..n; boundary(n) == t_f exactly.
  double boundary(int i) const { return i == n ? t_f : i * (t_f / n); }
  std::vector<double> edges() const;
};

/**
 * Piecewise-constant control ξ = (u, d) on a partition of [0, t_f]. Row c of `d`
 * holds the switching weights on [edges[c], edges[c+1]) and lies in the simplex.
 *
 * The partition is uniform for signals built from a Grid; projected signals carry
 * their pulse edges as boundaries.
 */
class RelaxedSignal {
 public:
  RelaxedSignal() = default;
  RelaxedSignal(const Grid& grid, MatrixXd d, MatrixXd u = {});
  RelaxedSignal(std::vector<double> edges, MatrixXd d, MatrixXd u = {});

  int cells() const { return static_cast<int>(d_.rows()); }
  int n_sigma() const { return static_cast<int>(d_.cols()); }
  int n_u() const { return static_cast<int>(u_.cols()); }
  double t_f() const { return edges_.back(); }
  double cell_start(int c) const { return edges_[c]; }
  double cell_width(int c) const { return edges_[c + 1] - edges_[c]; }
  const std::vector<double>& edges() const { return edges_; }
  const MatrixXd& d() const { return d_; }
  const MatrixXd& u() const { return u_; }
  auto weights(int c) const { return d_.row(c).transpose(); }
  auto input(int c) const { return u_.row(c).transpose(); }

  /// Index of the cell containing t (the last cell for t == t_f).
  int cell_at(double t) const;
  bool same_partition(const RelaxedSignal& other) const;
  /// Throws std::invalid_argument unless every u row lies in `box`.
  void check_input_box(const Box& box) const;

 private:
  void validate() const;

  std::vector<double> edges_;
  MatrixXd d_;
  MatrixXd u_;
};

/// A relaxed signal whose weight rows are simplex vertices.
class PureSignal {
 public:
  static constexpr double kVertexTol = 1e-9;

  explicit PureSignal(RelaxedSignal s);

  const RelaxedSignal& relaxed() const { return s_; }
  operator const RelaxedSignal&() const { return s_; }
  /// Active mode index of cell c.
  int mode(int c) const;

 private:
  RelaxedSignal s_;
};

/// Exact L2 norm of the piecewise-constant (d, u) function.
double l2_norm(const RelaxedSignal& s);
/// L2 norm of an arbitrary piecewise-constant vector function (rows per cell).
double l2_norm(const std::vector<double>& edges, const MatrixXd& rows);

bool is_pure(const RelaxedSignal& s, double tol);

/// Rowwise (1 - lambda) a + lambda b on a shared partition.
RelaxedSignal convex_combine(const RelaxedSignal& a, const RelaxedSignal& b, double lambda);

/// Largest per-cell Euclidean distance between weight rows.
double signal_sup_distance(const RelaxedSignal& a, const RelaxedSignal& b);

/// Default switch time of the example's initial signal: boundary 50 of a 64-cell grid on [0, 2].
inline constexpr double kPaperSwitchTime = 2.0 * 49.0 / 64.0;

/// Mode 1 on cells whose midpoint is <= switch_time, mode 2 after. Requires a grid on [0, 2].
PureSignal initial_signal_paper(const Grid& grid, double switch_time = kPaperSwitchTime);

/// Constant-mode signal on a grid.
PureSignal constant_mode_signal(const Grid& grid, int n_sigma, int mode, int n_u = 0);

/// Integral of d over [a, b].
VectorXd integrate_weights(const RelaxedSignal& s, double a, double b);

/// Per-cell duty-cycle average of `s` onto `grid`.
RelaxedSignal resample_average(const RelaxedSignal& s, const Grid& grid);

/// Sorted union of both partitions; boundaries closer than `merge_tol` collapse.
std::vector<double> merge_edges(const std::vector<double>& a, const std::vector<double>& b,
                                double merge_tol = 1e-13);

/// Re-express `s` on a finer partition that contains all of its edges.
RelaxedSignal refine(const RelaxedSignal& s, const std::vector<double>& edges);

}  // namespace swopt
