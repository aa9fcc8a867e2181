#include "support.hpp"

#include "swopt/cli.hpp"
#include "swopt/config.hpp"
#include "swopt/io.hpp"
#include "swopt/project.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace swopt;
namespace fs = std::filesystem;

namespace {

ConfigFile cfg(const std::string& text) {
  std::istringstream is(text);
  return ConfigFile::parse(is, "t.cfg");
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("swopt_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  if (out_text) *out_text = out.str() + err.str();
  return rc;
}

const char* kRamp = R"(
[problem]
name = ramp
n_x = 2
t_f = 2
x0 = 0 0
cost = distance 2 1
constraint.1 = -5 1 0

[mode.1]
f.1 = linear 1 0 0
f.2 = linear 0 0 0

[mode.2]
f.1 = linear 0 0 0
f.2 = piecewise x1 0 1 | 0 0 ; 0 1 ; 1 0
)";

}  // namespace

TEST_CASE("config grammar and line-anchored errors") {
  const ConfigFile f = cfg("# top\n[run]\nproblem = paper_example  # trailing\n\n[solver]\nN = 32\n");
  CHECK(f.text("run", "problem") == "paper_example");
  CHECK(f.integer("solver", "N") == 32);
  CHECK(f.section_line("solver") == 5);

  CHECK(error_of([] { cfg("key = 1\n"); }) == "t.cfg:1: key outside of any [section]");
  CHECK(error_of([] { cfg("[a]\nx = 1\nx = 2\n"); }).rfind("t.cfg:3:", 0) == 0);
  CHECK(error_of([] { cfg("[a]\n[a]\n"); }).rfind("t.cfg:2:", 0) == 0);
  CHECK(error_of([] { cfg("[a\n"); }).rfind("t.cfg:1:", 0) == 0);
  CHECK(error_of([] { cfg("[a]\nx =\n"); }).rfind("t.cfg:2:", 0) == 0);
  CHECK(error_of([] { cfg("[a]\njust words\n"); }).rfind("t.cfg:2:", 0) == 0);
  CHECK(error_of([] { cfg("[a]\nx = abc\n").number("a", "x"); }).rfind("t.cfg:2:", 0) == 0);
  CHECK(error_of([] { cfg("[a]\nx = 1.5\n").integer("a", "x"); }).rfind("t.cfg:2:", 0) == 0);
  CHECK(error_of([] { cfg("[a]\nx = yes\n").boolean("a", "x"); }).rfind("t.cfg:2:", 0) == 0);
}

TEST_CASE("run config keys and validation") {
  const RunConfig rc = parse_run_config(cfg(
      "[run]\ninitial = mode 2\nemit_plots = false\n[solver]\ntopology = trajectory\nN = 16\n"
      "gamma = 0.02\n[oracle]\ncells = 4\n"));
  CHECK(rc.initial.kind == InitialSpec::Kind::Mode);
  CHECK(rc.initial.mode == 1);
  CHECK_FALSE(rc.emit_plots);
  CHECK(rc.solver.topology == TopologyKind::FullTrajectory);
  CHECK(rc.solver.N == 16);
  CHECK(rc.solver.gamma == doctest::Approx(0.02));
  CHECK(rc.oracle_cells == 4);

  CHECK(error_of([] { parse_run_config(cfg("[run]\nbogus = 1\n")); }) ==
        "t.cfg:2: unknown key 'bogus' in [run]");
  CHECK(error_of([] { parse_run_config(cfg("[extra]\nx = 1\n")); }).rfind("t.cfg:1:", 0) == 0);
  CHECK(error_of([] { parse_run_config(cfg("[solver]\ntopology = sideways\n")); }).rfind("t.cfg:2:", 0) == 0);
  CHECK(error_of([] { parse_run_config(cfg("[run]\ninitial = mode 0\n")); }).rfind("t.cfg:2:", 0) == 0);
  // Out-of-range values point at the offending key.
  CHECK(error_of([] { parse_run_config(cfg("[solver]\nN = 8\ngamma = -1\n")); }).rfind("t.cfg:3:", 0) == 0);
}

TEST_CASE("problem files") {
  const SwitchedProblem p = parse_problem(cfg(kRamp));
  CHECK(p.name == "ramp");
  CHECK(p.n_sigma == 2);
  REQUIRE(p.constraints.size() == 1);

  VectorXd out(2), x(2), u(0);
  MatrixXd jac(2, 2);
  for (double x1 : {-0.5, 0.0, 0.25, 0.999, 1.0, 3.0}) {
    x << x1, 7.0;
    p.modes[1](0.0, x, u, out);
    const double ramp = x1 < 0.0 ? 0.0 : (x1 < 1.0 ? x1 : 1.0);
    CHECK(out[1] == doctest::Approx(ramp));
    p.mode_jacobians[1](0.0, x, u, jac);
    CHECK(jac(1, 0) == doctest::Approx(x1 >= 0.0 && x1 < 1.0 ? 1.0 : 0.0));
  }
  x << 6.0, 0.0;
  CHECK(p.constraints[0](x) == doctest::Approx(1.0));
  x << 2.0, 1.0;
  CHECK(p.cost.value(x) == doctest::Approx(0.0));

  std::string bad = kRamp;
  bad.replace(bad.find("0 0 ; 0 1 ; 1 0"), 15, "0 0 ; 0 1");
  CHECK(error_of([&] { parse_problem(cfg(bad)); }).rfind("t.cfg:16:", 0) == 0);
  CHECK(error_of([] { parse_problem(cfg("[problem]\nn_x = 1\nt_f = 1\nx0 = 0\ncost = distance 0\n[mode.2]\n"
                                        "f.1 = linear 0 0\n")); })
            .find("t.cfg") == 0);
  CHECK_THROWS(load_problem("no_such_problem"));
  CHECK(load_problem("paper_example").name == "paper_example");
}

TEST_CASE("signal CSV round trip is exact") {
  testing::Stream rng(11);
  const Grid g(2.0, 24);
  const RelaxedSignal s = testing::structured_signal(rng, g, 3);
  std::ostringstream os;
  write_signal_csv(os, s);
  std::istringstream is(os.str());
  const RelaxedSignal back = read_signal_csv(is, "s.csv");
  CHECK(back.edges() == s.edges());
  CHECK((back.d() - s.d()).cwiseAbs().maxCoeff() == 0.0);

  const PureSignal pr = project_Rk(s, 5);
  std::ostringstream os2;
  write_signal_csv(os2, pr.relaxed());
  std::istringstream is2(os2.str());
  CHECK(read_signal_csv(is2, "p.csv").edges() == pr.relaxed().edges());

  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_signal_csv(in, "s.csv");
  };
  CHECK(error_of([&] { parse("t_start,t_end,d_2,d_1\n0,1,1,0\n"); }).rfind("s.csv:1:", 0) == 0);
  CHECK(error_of([&] { parse("t_start,t_end,d_1,d_2\n0,1,1,0\n1.5,2,1,0\n"); }).rfind("s.csv:3:", 0) == 0);
  CHECK(error_of([&] { parse("t_start,t_end,d_1,d_2\n0,1,0.7,0.7\n"); }).rfind("s.csv:2:", 0) == 0);
  CHECK(error_of([&] { parse("t_start,t_end,d_1,d_2\n0,1,x,0\n"); }).rfind("s.csv:2:", 0) == 0);
}

TEST_CASE("format_double reads back exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 3.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("SVG is deterministic and marks both points") {
  IterationRecord a, b;
  a.terminal = (VectorXd(2) << 3.0625, 0.8789).finished();
  b.terminal = (VectorXd(2) << 3.0, 2.0).finished();
  const std::vector<SvgMarker> m{{"A", 3.0, 2.0}, {"B", 3.0, 1.0}};
  const std::string s1 = terminal_states_svg({a, b}, m, "t");
  CHECK(s1 == terminal_states_svg({a, b}, m, "t"));
  CHECK(s1.rfind("<svg", 0) == 0);
  std::size_t diamonds = 0;
  for (std::size_t pos = s1.find("<polygon"); pos != std::string::npos; pos = s1.find("<polygon", pos + 1)) ++diamonds;
  CHECK(diamonds == 2);
  CHECK(s1.find(">A<") != std::string::npos);
  CHECK(s1.find(">B<") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("codes");
  std::string text;

  CHECK(run_cli({}, &text) == cli::kError);
  CHECK(run_cli({"frobnicate"}, &text) == cli::kError);
  CHECK(run_cli({"solve", "--config", (dir / "missing.cfg").string()}, &text) == cli::kError);
  CHECK(run_cli({"solve", "--topology", "sideways"}, &text) == cli::kError);

  put(dir / "unknown.cfg", "[run]\nproblem = no_such_problem\n");
  CHECK(run_cli({"solve", "--config", (dir / "unknown.cfg").string()}, &text) == cli::kError);
  CHECK(text.find("no_such_problem") != std::string::npos);

  // Terminal run from the configured start: stationary at A.
  put(dir / "terminal.cfg", "[run]\noutput_dir = t\n[solver]\ntopology = terminal\n");
  CHECK(run_cli({"solve", "--config", (dir / "terminal.cfg").string(), "--seedless"}, &text) ==
        cli::kStationary);
  for (const char* f : {"history.csv", "telemetry.csv", "solution_signal.csv", "trajectory.csv",
                        "terminal_states.svg"}) {
    CHECK(fs::exists(dir / "t" / f));
  }
  CHECK(slurp(dir / "t" / "history.csv").rfind("iter,J,theta,psi,k,l,Q,x1_tf,x2_tf,wall_ms\n", 0) == 0);

  // The flag overrides the file; the trajectory topology stalls.
  CHECK(run_cli({"solve", "--config", (dir / "terminal.cfg").string(), "--topology", "trajectory", "--out",
                 (dir / "tr").string()},
                &text) == cli::kStalled);

  put(dir / "short.cfg", "[run]\nemit_plots = false\n[solver]\nmax_iter = 2\n");
  CHECK(run_cli({"solve", "--config", (dir / "short.cfg").string(), "--out", (dir / "s").string()}, &text) ==
        cli::kMaxIter);
  CHECK_FALSE(fs::exists(dir / "s" / "terminal_states.svg"));

  const std::string sol = (dir / "t" / "solution_signal.csv").string();
  CHECK(run_cli({"project", sol, "--k", "0"}, &text) == cli::kError);
  CHECK(run_cli({"project", sol}, &text) == cli::kError);
  CHECK(run_cli({"project", sol, "--k", "4", "--out", (dir / "p").string()}, &text) == 0);
  CHECK(fs::exists(dir / "p" / "projected_signal.csv"));
  put(dir / "bad.csv", "t_start,t_end,d_1,d_2\n0,2,0.9,0.9\n");
  CHECK(run_cli({"project", (dir / "bad.csv").string(), "--k", "4"}, &text) == cli::kError);
  CHECK(text.find("bad.csv:2:") != std::string::npos);

  put(dir / "half.csv", "t_start,t_end,d_1,d_2\n0,1,0.5,0.5\n1,2,0.5,0.5\n");
  CHECK(run_cli({"project", (dir / "half.csv").string(), "--k", "1", "--out", (dir / "h").string()}, &text) == 0);
  CHECK(slurp(dir / "h" / "projected_signal.csv") ==
        "t_start,t_end,d_1,d_2\n0,0.25,0,1\n0.25,0.75,1,0\n0.75,1,0,1\n"
        "1,1.25,0,1\n1.25,1.75,1,0\n1.75,2,0,1\n");

  CHECK(run_cli({"simulate", sol, "--out", (dir / "sim").string()}, &text) == 0);
  CHECK(text.find("terminal 3 2") != std::string::npos);
  CHECK(run_cli({"theta", sol}, &text) == 0);
  CHECK(text.rfind("theta ", 0) == 0);
  put(dir / "oracle.cfg", "[run]\noutput_dir = o\n[oracle]\ncells = 4\n");
  CHECK(run_cli({"oracle", "--config", (dir / "oracle.cfg").string()}, &text) == 0);
  CHECK(text.find("candidates 16") != std::string::npos);
  put(dir / "budget.cfg", "[oracle]\ncells = 8\nbudget = 10\n");
  CHECK(run_cli({"oracle", "--config", (dir / "budget.cfg").string()}, &text) == cli::kError);
}

TEST_CASE("verify fails when a rate-table branch is negated") {
  std::string text;
  const fs::path dir = scratch("verify");
  CHECK(run_cli({"verify", "--sabotage", "--out", dir.string()}, &text) == cli::kError);
  CHECK(text.find("FAIL  rate tables continuous") != std::string::npos);
  const std::string report = slurp(dir / "report.txt");
  CHECK(run_cli({"verify", "--sabotage", "--out", dir.string()}, &text) == cli::kError);
  CHECK(slurp(dir / "report.txt") == report);
}
