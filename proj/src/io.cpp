#include "swopt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace swopt {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

double parse_field(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ParseError(where + " not a number: '" + t + "'");
  }
  return v;
}

// Fixed three decimals keeps the SVG text independent of the double formatter.
std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return std::string(buf) == "-0.000" ? "0.000" : buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_signal_csv(std::ostream& os, const RelaxedSignal& s) {
  os << "t_start,t_end";
  for (int i = 0; i < s.n_sigma(); ++i) os << ",d_" << i + 1;
  for (int i = 0; i < s.n_u(); ++i) os << ",u_" << i + 1;
  os << '\n';
  for (int c = 0; c < s.cells(); ++c) {
    os << format_double(s.edges()[c]) << ',' << format_double(s.edges()[c + 1]);
    for (int i = 0; i < s.n_sigma(); ++i) os << ',' << format_double(s.d()(c, i));
    for (int i = 0; i < s.n_u(); ++i) os << ',' << format_double(s.u()(c, i));
    os << '\n';
  }
}

RelaxedSignal read_signal_csv(std::istream& is, const std::string& source) {
  std::string line;
  int lineno = 1;
  if (!std::getline(is, line)) throw ParseError(source + ":1: empty signal file");
  const auto header = split(trim(line), ',');
  if (header.size() < 3 || trim(header[0]) != "t_start" || trim(header[1]) != "t_end") {
    throw ParseError(source + ":1: header must start with t_start,t_end");
  }
  int n_d = 0, n_u = 0;
  for (std::size_t i = 2; i < header.size(); ++i) {
    const std::string h = trim(header[i]);
    if (h == "d_" + std::to_string(n_d + 1) && n_u == 0) {
      ++n_d;
    } else if (h == "u_" + std::to_string(n_u + 1)) {
      ++n_u;
    } else {
      throw ParseError(source + ":1: unexpected column '" + h + "'");
    }
  }
  if (n_d == 0) throw ParseError(source + ":1: no d_ columns");

  std::vector<double> edges;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ":";
    const auto fields = split(trim(line), ',');
    if (fields.size() != header.size()) {
      throw ParseError(where + " expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const double a = parse_field(fields[0], where);
    const double b = parse_field(fields[1], where);
    if (edges.empty()) {
      edges.push_back(a);
    } else if (a != edges.back()) {
      throw ParseError(where + " t_start does not match the previous t_end");
    }
    edges.push_back(b);
    std::vector<double> row;
    for (std::size_t i = 2; i < fields.size(); ++i) row.push_back(parse_field(fields[i], where));
    try {
      validate_simplex_point(Eigen::Map<const VectorXd>(row.data(), n_d));
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + " " + e.what());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": no signal rows");

  const auto n = static_cast<Eigen::Index>(rows.size());
  MatrixXd d(n, n_d), u(n, n_u);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (int i = 0; i < n_d; ++i) d(c, i) = rows[c][i];
    for (int i = 0; i < n_u; ++i) u(c, i) = rows[c][n_d + i];
  }
  try {
    return RelaxedSignal(std::move(edges), std::move(d), std::move(u));
  } catch (const std::invalid_argument& e) {
    throw ParseError(source + ": " + e.what());
  }
}

RelaxedSignal read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  return read_signal_csv(in, path);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << 't';
  for (Eigen::Index i = 0; i < traj.states.rows(); ++i) os << ",x_" << i + 1;
  os << '\n';
  for (int j = 0; j < traj.samples(); ++j) {
    os << format_double(traj.times[j]);
    for (Eigen::Index i = 0; i < traj.states.rows(); ++i) os << ',' << format_double(traj.states(i, j));
    os << '\n';
  }
}

void write_history_csv(std::ostream& os, const std::vector<IterationRecord>& history) {
  const Eigen::Index nx = history.empty() ? 2 : history.front().terminal.size();
  os << "iter,J,theta,psi,k,l,Q";
  for (Eigen::Index i = 0; i < nx; ++i) os << ",x" << i + 1 << "_tf";
  os << ",wall_ms\n";
  for (const IterationRecord& r : history) {
    os << r.iter << ',' << format_double(r.J) << ',' << format_double(r.theta) << ','
       << (r.Psi ? format_double(*r.Psi) : "unconstrained") << ',' << r.k_used << ',' << r.l_used
       << ',' << format_double(r.Q_value);
    for (Eigen::Index i = 0; i < nx; ++i) os << ',' << format_double(r.terminal[i]);
    os << ',' << format_double(r.wall_ms) << '\n';
  }
}

void write_telemetry_csv(std::ostream& os, const std::vector<IterationRecord>& history) {
  os << "iter,theta_r,descent,projection_bound,l_flagged,k_flagged,"
        "neighborhood_move,trajectory_change\n";
  for (const IterationRecord& r : history) {
    os << r.iter << ',' << format_double(r.theta_r) << ',' << format_double(r.descent) << ','
       << format_double(r.projection_bound) << ',' << r.l_flagged
       << ',' << r.k_flagged << ',' << r.neighborhood_move << ','
       << format_double(r.trajectory_change) << '\n';
  }
}

std::string terminal_states_svg(const std::vector<IterationRecord>& history,
                                const std::vector<SvgMarker>& markers, const std::string& title) {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  auto grow = [&](double x, double y) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  };
  for (const SvgMarker& m : markers) grow(m.x, m.y);
  for (const IterationRecord& r : history) {
    if (r.terminal.size() >= 2) grow(r.terminal[0], r.terminal[1]);
  }
  x_lo = std::floor(x_lo) - 0.5;
  y_lo = std::floor(y_lo) - 0.5;
  x_hi = std::ceil(x_hi) + 0.5;
  y_hi = std::ceil(y_hi) + 0.5;

  const double W = 480, H = 400, L = 60, R = 20, T = 40, B = 50;
  const double sx = (W - L - R) / (x_hi - x_lo), sy = (H - T - B) / (y_hi - y_lo);
  auto px = [&](double x) { return fixed3(L + (x - x_lo) * sx); };
  auto py = [&](double y) { return fixed3(H - B - (y - y_lo) * sy); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"14\">"
    << title << "</text>\n";
  // Axes with unit ticks.
  s << "<g stroke=\"black\" stroke-width=\"1\">\n";
  s << "<line x1=\"" << px(x_lo) << "\" y1=\"" << py(y_lo) << "\" x2=\"" << px(x_hi) << "\" y2=\""
    << py(y_lo) << "\"/>\n";
  s << "<line x1=\"" << px(x_lo) << "\" y1=\"" << py(y_lo) << "\" x2=\"" << px(x_lo) << "\" y2=\""
    << py(y_hi) << "\"/>\n";
  s << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double t = std::ceil(x_lo); t <= x_hi; t += 1.0) {
    s << "<line x1=\"" << px(t) << "\" y1=\"" << py(y_lo) << "\" x2=\"" << px(t) << "\" y2=\""
      << fixed3(H - B + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << px(t) << "\" y=\"" << fixed3(H - B + 18) << "\" text-anchor=\"middle\">"
      << static_cast<int>(t) << "</text>\n";
  }
  for (double t = std::ceil(y_lo); t <= y_hi; t += 1.0) {
    s << "<line x1=\"" << fixed3(L - 5) << "\" y1=\"" << py(t) << "\" x2=\"" << px(x_lo) << "\" y2=\""
      << py(t) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fixed3(L - 9) << "\" y=\"" << fixed3(std::stod(py(t)) + 4)
      << "\" text-anchor=\"end\">" << static_cast<int>(t) << "</text>\n";
  }
  s << "<text x=\"" << fixed3(L + (W - L - R) / 2) << "\" y=\"" << fixed3(H - 12)
    << "\" text-anchor=\"middle\">x1(t_f)</text>\n";
  s << "<text x=\"16\" y=\"" << fixed3(T + (H - T - B) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fixed3(T + (H - T - B) / 2) << ")\">x2(t_f)</text>\n";
  s << "</g>\n";

  if (!history.empty()) {
    s << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < history.size(); ++i) {
      if (i) s << ' ';
      s << px(history[i].terminal[0]) << ',' << py(history[i].terminal[1]);
    }
    s << "\"/>\n<g fill=\"#1f5fa8\">\n";
    for (const IterationRecord& r : history) {
      s << "<circle cx=\"" << px(r.terminal[0]) << "\" cy=\"" << py(r.terminal[1]) << "\" r=\"3\"/>\n";
    }
    s << "</g>\n";
  }
  for (const SvgMarker& m : markers) {
    const double cx = std::stod(px(m.x)), cy = std::stod(py(m.y)), r = 7;
    s << "<polygon fill=\"black\" points=\"" << fixed3(cx) << ',' << fixed3(cy - r) << ' '
      << fixed3(cx + r) << ',' << fixed3(cy) << ' ' << fixed3(cx) << ',' << fixed3(cy + r) << ' '
      << fixed3(cx - r) << ',' << fixed3(cy) << "\"/>\n";
    s << "<text x=\"" << fixed3(cx + 10) << "\" y=\"" << fixed3(cy - 8)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << m.label << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<std::pair<std::string, std::string>> solve_artifacts(
    const SwitchedProblem& problem, const VectorRef& x0, const SolveResult& result, int substeps,
    const std::vector<SvgMarker>* markers, const std::string& title) {
  std::vector<std::pair<std::string, std::string>> out;
  std::ostringstream history, telemetry, signal, traj;
  write_history_csv(history, result.history);
  write_telemetry_csv(telemetry, result.history);
  write_signal_csv(signal, result.solution);
  write_trajectory_csv(traj, simulate(problem, result.solution, x0, substeps));
  out.emplace_back("history.csv", history.str());
  out.emplace_back("telemetry.csv", telemetry.str());
  out.emplace_back("solution_signal.csv", signal.str());
  out.emplace_back("trajectory.csv", traj.str());
  if (markers) out.emplace_back("terminal_states.svg", terminal_states_svg(result.history, *markers, title));
  return out;
}

}  // namespace swopt
