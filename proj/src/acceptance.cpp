#include "swopt/acceptance.hpp"

#include "swopt/adjoint.hpp"
#include "swopt/io.hpp"
#include "swopt/project.hpp"
#include "swopt/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

namespace swopt {

namespace {

// Additive recurrence on the golden ratio: an even spread of test values in [0, 1)
// without any random engine.
class Sequence {
 public:
  explicit Sequence(double start) : x_(start) {}
  double next() {
    x_ += 0.6180339887498949;
    x_ -= std::floor(x_);
    return x_;
  }
  int index(int n) { return std::min(n - 1, static_cast<int>(next() * n)); }

 private:
  double x_;
};

RelaxedSignal interior_signal(Sequence& seq, const Grid& g) {
  MatrixXd d(g.n, 2);
  for (int c = 0; c < g.n; ++c) {
    const double a = 0.05 + 0.9 * seq.next();
    d.row(c) << a, 1.0 - a;
  }
  return RelaxedSignal(g, d);
}

// Vertex runs, constant blends and free cells.
RelaxedSignal structured_signal(Sequence& seq, const Grid& g) {
  MatrixXd d(g.n, 2);
  int c = 0;
  while (c < g.n) {
    const int run = 1 + seq.index(std::max(1, g.n / 4));
    const int kind = seq.index(3);
    double a = kind == 0 ? static_cast<double>(seq.index(2)) : seq.next();
    for (int j = 0; j < run && c < g.n; ++j, ++c) {
      if (kind == 2) a = seq.next();
      d.row(c) << a, 1.0 - a;
    }
  }
  return RelaxedSignal(g, d);
}

PureSignal vertex_signal(const Grid& g, int index) {
  MatrixXd d = MatrixXd::Zero(g.n, 2);
  for (int c = 0; c < g.n; ++c) d(c, (index >> (g.n - 1 - c)) & 1) = 1.0;
  return PureSignal(RelaxedSignal(g, d));
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct ExampleRun {
  SolveResult result;
  double J = 0.0;
  VectorXd terminal;
  double seconds = 0.0;
};

ExampleRun run_example(const SwitchedProblem& p, TopologyKind kind) {
  SolverConfig cfg;
  cfg.topology = kind;
  const auto t0 = std::chrono::steady_clock::now();
  ExampleRun r{solve(p, p.x0, initial_signal_paper(Grid(p.t_f, cfg.N)), cfg), 0.0, {}, 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (IterationRecord& rec : r.result.history) rec.wall_ms = 0.0;
  const Trajectory traj = simulate(p, r.result.solution, p.x0, cfg.substeps);
  r.J = cost_J(p, traj);
  r.terminal = traj.terminal();
  return r;
}

std::vector<SvgMarker> example_markers() { return {{"A", 3.0, 2.0}, {"B", 3.0, 1.0}}; }

std::string artifacts_text(const SwitchedProblem& p, const ExampleRun& run, const std::string& title) {
  const auto markers = example_markers();
  std::string all;
  for (const auto& [name, text] : solve_artifacts(p, p.x0, run.result, kDefaultSubsteps, &markers, title)) {
    all += name + "\n" + text;
  }
  return all;
}

}  // namespace

SwitchedProblem sabotaged_example() {
  const PiecewiseScalar good = make_q1();
  auto affine = [](double c, double s) {
    return Branch{[c, s](double x) { return c + s * x; }, [s](double) { return s; }};
  };
  PiecewiseScalar bad(good.breakpoints(),
                      {affine(0.0, 0.0), affine(2.0, 2.0), affine(-2.0, 4.0), affine(-2.0, 4.0),
                       Branch{[](double x) { return 4.0 / (3.0 - x); },
                              [](double x) { return 4.0 / ((3.0 - x) * (3.0 - x)); }},
                       affine(4.0, 0.0)});
  return paper_example(std::move(bad), make_q2());
}

bool AcceptanceReport::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const CriterionResult& r) { return r.passed; });
}

AcceptanceReport run_acceptance(const AcceptanceOptions& options) {
  AcceptanceReport report;
  const SwitchedProblem p = options.sabotage_q1 ? sabotaged_example() : paper_example();
  auto add = [&](std::string name, bool ok, std::string detail) {
    report.rows.push_back({std::move(name), ok, std::move(detail)});
  };

  // Precondition: the rate tables, read through the problem's own mode fields, are
  // continuous at every breakpoint.
  {
    double jump = 0.0;
    const VectorXd none(0);
    auto probe = [&](int mode, int var, const std::vector<double>& breaks) {
      VectorXd fl(2), fr(2);
      for (double b : breaks) {
        VectorXd xl = VectorXd::Zero(2), xr = VectorXd::Zero(2);
        xl[var] = std::nextafter(b, -INFINITY);
        xr[var] = b;
        p.modes[mode](0.0, xl, none, fl);
        p.modes[mode](0.0, xr, none, fr);
        jump = std::max(jump, (fl - fr).cwiseAbs().maxCoeff());
      }
    };
    probe(0, 1, make_q1().breakpoints());
    probe(1, 0, make_q2().breakpoints());
    add("rate tables continuous", jump <= 1e-9, fmt("max jump %.3g", jump));
  }

  const ExampleRun terminal = run_example(p, TopologyKind::TerminalState);
  const ExampleRun trajectory = run_example(p, TopologyKind::FullTrajectory);
  const VectorXd A = paper_target();
  const VectorXd B = (VectorXd(2) << 3.0, 1.0).finished();

  {
    const double dist = (terminal.terminal - A).norm();
    const bool ok = terminal.result.status == SolveStatus::Stationary && terminal.J <= 0.05 &&
                    dist <= 0.05 && terminal.seconds <= 60.0;
    add("terminal-state topology reaches A", ok,
        to_string(terminal.result.status) + fmt(", J %.3g, |x(t_f) - A| %.3g", terminal.J, dist) +
            (terminal.seconds <= 60.0 ? "" : ", over 60 s"));
  }
  {
    const double dist = (trajectory.terminal - B).norm();
    const bool stop_ok = trajectory.result.status == SolveStatus::Stationary ||
                         trajectory.result.status == SolveStatus::Stalled;
    const bool ok = stop_ok && trajectory.J >= 0.5 && trajectory.seconds <= 60.0;
    const bool target = dist <= 0.15 && std::abs(trajectory.J - 1.0) <= 0.1;
    add("trajectory topology stops short of the optimum", ok,
        to_string(trajectory.result.status) + fmt(", J %.3g, |x(t_f) - B| %.3g", trajectory.J, dist) +
            (target ? ", B target met" : ", B target missed") +
            (trajectory.seconds <= 60.0 ? "" : ", over 60 s"));
  }

  {
    Sequence seq(0.11);
    double worst = -INFINITY;
    for (int i = 0; i < 100; ++i) {
      const RelaxedSignal s = structured_signal(seq, Grid(p.t_f, 16 << (i % 3)));
      worst = std::max(worst, optimality_theta(p, s, p.x0).theta);
    }
    SwitchedProblem flat = p;
    flat.cost.value = [](const VectorRef&) { return 0.0; };
    flat.cost.gradient = [](const VectorRef& x) { return CostGradient{VectorXd::Zero(x.size()), false}; };
    const double zero = optimality_theta(flat, structured_signal(seq, Grid(p.t_f, 32)), p.x0).theta;
    add("optimality function nonpositive", worst <= 1e-10 && zero == 0.0,
        fmt("max theta %.3g over 100 signals, theta %.3g at h = 0", worst, zero));
  }

  {
    Sequence seq(0.23);
    const Grid g(p.t_f, 64);
    double worst_rel = 0.0;
    int linear = 0;
    for (int i = 0; i < 10; ++i) {
      const RelaxedSignal a = interior_signal(seq, g);
      const RelaxedSignal b = interior_signal(seq, g);
      const Trajectory t = simulate(p, a, p.x0);
      const double J0 = cost_J(p, t);
      const double dj = directional_derivative_J(p, t, integrate_costate(p, t, a), a, b.d() - a.d());
      auto gap = [&](double lambda) {
        const double J = cost_J(p, simulate(p, convex_combine(a, b, lambda), p.x0));
        return std::abs((J - J0) / lambda - dj);
      };
      const double e3 = gap(1e-3), e4 = gap(1e-4), e5 = gap(1e-5);
      worst_rel = std::max(worst_rel, e5 / std::max(1.0, std::abs(dj)));
      auto tenfold = [](double r) { return r >= 10.0 / 3.0 && r <= 30.0; };
      if (tenfold(e3 / e4) && tenfold(e4 / e5)) ++linear;
    }
    add("adjoint derivative matches finite differences", worst_rel <= 1e-3 && linear == 10,
        fmt("max relative gap %.3g at 1e-5, %g/10 pairs first order", worst_rel, linear));
  }

  {
    const Grid g(p.t_f, 8);
    Sequence seq(0.37);
    std::vector<RelaxedSignal> signals{resample_average(initial_signal_paper(Grid(p.t_f, 64)), g)};
    for (int i = 0; i < 5; ++i) signals.push_back(structured_signal(seq, g));
    double worst = 0.0;
    for (const RelaxedSignal& s : signals) {
      const ThetaResult th = optimality_theta(p, s, p.x0);
      double best = INFINITY;
      for (int idx = 0; idx < 256; ++idx) {
        const PureSignal v = vertex_signal(g, idx);
        best = std::min(best, directional_derivative_J(p, th.traj, th.costate, s, v.relaxed().d() - s.d()));
      }
      worst = std::max(worst, std::abs(th.theta - best));
    }
    add("theta equals brute force over vertex directions", worst <= 1e-10,
        fmt("max gap %.3g on 6 signals, N = 8", worst));
  }

  {
    Sequence seq(0.41);
    double duty = 0.0;
    int decreasing = 0;
    for (int i = 0; i < 10; ++i) {
      const RelaxedSignal s = interior_signal(seq, Grid(p.t_f, 32));
      for (int k : {6, 12}) {
        const PureSignal r = project_Rk(s, k);
        const int cells = 1 << k;
        for (int c = 0; c < cells; ++c) {
          const double a = p.t_f * c / cells, b = p.t_f * (c + 1) / cells;
          duty = std::max(duty, (integrate_weights(r, a, b) - integrate_weights(s, a, b)).cwiseAbs().maxCoeff());
        }
      }
      if (projection_error(p, s, 12, TopologyKind::FullTrajectory, p.x0) <
          projection_error(p, s, 6, TopologyKind::FullTrajectory, p.x0)) {
        ++decreasing;
      }
    }
    // Aligned with the 2^8 cells: mode 1, 2, 1 on [0, .5), [.5, 1.5), [1.5, 2).
    const Grid g(p.t_f, 256);
    MatrixXd d = MatrixXd::Zero(g.n, 2);
    for (int c = 0; c < g.n; ++c) d(c, (c >= 64 && c < 192) ? 1 : 0) = 1.0;
    const PureSignal aligned{RelaxedSignal(g, d)};
    const double aligned_err = std::max(projection_error(p, aligned, 8, TopologyKind::TerminalState, p.x0),
                                        projection_error(p, aligned, 8, TopologyKind::FullTrajectory, p.x0));
    add("projection preserves duty cycles and converges",
        duty <= 1e-12 && decreasing == 10 && aligned_err <= 1e-9,
        fmt("duty gap %.3g, %g/10 decreasing k = 6 -> 12, aligned error %.3g", duty, decreasing,
            aligned_err));
  }

  {
    Sequence seq(0.53);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Grid g(p.t_f, 8 << (i % 4));
      MatrixXd d = MatrixXd::Zero(g.n, 2);
      for (int c = 0; c < g.n; ++c) d(c, seq.index(2)) = 1.0;
      const PureSignal s{RelaxedSignal(g, d)};
      worst = std::max(worst, (simulate(p, s, p.x0).states - simulate_pure_direct(p, s, p.x0).states)
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    const Grid g(p.t_f, 64);
    const VectorXd m1 = simulate(p, constant_mode_signal(g, 2, 0), p.x0).terminal();
    const VectorXd m2 = simulate(p, constant_mode_signal(g, 2, 1), p.x0).terminal();
    const double e1 = (m1 - (VectorXd(2) << 4.0, 0.0).finished()).norm();
    const double e2 = m2.norm();
    add("pure and relaxed simulation agree", worst <= 1e-12 && e1 <= 1e-9 && e2 <= 1e-9,
        fmt("max deviation %.3g, mode-1 terminal error %.3g, mode-2 terminal error %.3g", worst, e1, e2));
  }

  {
    const OracleResult best = oracle_enumerate(p, p.x0, Grid(p.t_f, 8));
    const GammaRResult polished = gamma_r(p, best.best, p.x0, SolverConfig{});
    add("descent polish never worsens the oracle optimum", polished.J_end <= best.best_cost + 1e-9,
        fmt("oracle J %.3g, polished J %.3g", best.best_cost, polished.J_end));
  }

  {
    const SolverConfig cfg;
    const auto& h = terminal.result.history;
    int certified = 0;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < h.size(); ++i) {
      if (h[i].flagged()) continue;
      ++certified;
      ok = ok && h[i].descent <= cfg.gamma * h[i].theta_r && h[i].Q_value <= h[i].projection_bound;
    }
    add("unflagged iterations meet the descent and projection bounds", ok && certified >= 1,
        fmt("%g unflagged of %g updates", certified, static_cast<double>(h.size() - 1)));
  }

  {
    const std::string a = artifacts_text(p, terminal, "terminal-state topology") +
                          artifacts_text(p, trajectory, "trajectory topology");
    const ExampleRun again_t = run_example(p, TopologyKind::TerminalState);
    const ExampleRun again_f = run_example(p, TopologyKind::FullTrajectory);
    const std::string b = artifacts_text(p, again_t, "terminal-state topology") +
                          artifacts_text(p, again_f, "trajectory topology");
    add("artifacts are byte-identical across runs", a == b, fmt("%g bytes compared", a.size()));
  }

  if (!options.artifact_dir.empty()) {
    const auto markers = example_markers();
    for (const auto& [sub, run, title] :
         {std::tuple{"terminal", &terminal, "terminal-state topology"},
          std::tuple{"trajectory", &trajectory, "trajectory topology"}}) {
      const auto dir = std::filesystem::path(options.artifact_dir) / sub;
      for (const auto& [name, text] : solve_artifacts(p, p.x0, run->result, kDefaultSubsteps, &markers, title)) {
        write_file((dir / name).string(), text);
      }
    }
  }
  return report;
}

std::string format_report(const AcceptanceReport& report) {
  std::size_t width = 0;
  for (const CriterionResult& r : report.rows) width = std::max(width, r.name.size());
  std::string out;
  int passed = 0;
  for (const CriterionResult& r : report.rows) {
    out += r.passed ? "PASS  " : "FAIL  ";
    out += r.name + std::string(width - r.name.size() + 2, ' ') + r.detail + "\n";
    passed += r.passed;
  }
  out += std::to_string(passed) + "/" + std::to_string(report.rows.size()) + " criteria passed\n";
  return out;
}

}  // namespace swopt
