#include "swopt/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace swopt {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool to_double(const std::string& t, double& v) {
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  return ec == std::errc() && ptr == t.data() + t.size() && !t.empty();
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& is, const std::string& source) {
  ConfigFile f;
  f.source_ = source;
  const auto parent = std::filesystem::path(source).parent_path();
  f.base_dir_ = parent.empty() ? "." : parent.string();
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') f.fail(line, "unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      if (!valid_name(section)) f.fail(line, "bad section name '" + section + "'");
      if (f.has_section(section)) f.fail(line, "section [" + section + "] appears twice");
      f.sections_.push_back(section);
      f.section_lines_.push_back(line);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) f.fail(line, "expected 'key = value'");
    if (section.empty()) f.fail(line, "key outside of any [section]");
    Entry e{section, trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
    if (!valid_name(e.key)) f.fail(line, "bad key '" + e.key + "'");
    if (e.value.empty()) f.fail(line, "empty value for '" + e.key + "'");
    if (f.find(section, e.key)) f.fail(line, "duplicate key '" + e.key + "' in [" + section + "]");
    f.entries_.push_back(std::move(e));
  }
  return f;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  return parse(in, path);
}

bool ConfigFile::has_section(const std::string& section) const {
  return std::find(sections_.begin(), sections_.end(), section) != sections_.end();
}

int ConfigFile::section_line(const std::string& section) const {
  const auto it = std::find(sections_.begin(), sections_.end(), section);
  return it == sections_.end() ? 0 : section_lines_[it - sections_.begin()];
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section, const std::string& key) const {
  for (const Entry& e : entries_) {
    if (e.section == section && e.key == key) return &e;
  }
  return nullptr;
}

std::optional<std::string> ConfigFile::text(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  e->used = true;
  return e->value;
}

std::optional<double> ConfigFile::number(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  e->used = true;
  double v = 0.0;
  if (!to_double(e->value, v)) fail(*e, "'" + key + "' must be a number, got '" + e->value + "'");
  return v;
}

std::optional<int> ConfigFile::integer(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  e->used = true;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size()) {
    fail(*e, "'" + key + "' must be an integer, got '" + e->value + "'");
  }
  return v;
}

std::optional<bool> ConfigFile::boolean(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  e->used = true;
  if (e->value == "true") return true;
  if (e->value == "false") return false;
  fail(*e, "'" + key + "' must be true or false, got '" + e->value + "'");
}

std::optional<std::vector<double>> ConfigFile::numbers(const std::string& section,
                                                       const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  e->used = true;
  std::vector<double> out;
  for (const std::string& w : words(e->value)) {
    double v = 0.0;
    if (!to_double(w, v)) fail(*e, "'" + key + "': not a number: '" + w + "'");
    out.push_back(v);
  }
  return out;
}

void ConfigFile::reject_unused() const {
  for (const Entry& e : entries_) {
    if (!e.used) fail(e, "unknown key '" + e.key + "' in [" + e.section + "]");
  }
}

void ConfigFile::fail(const Entry& e, const std::string& message) const { fail(e.line, message); }

void ConfigFile::fail(int line, const std::string& message) const {
  if (line <= 0) throw ParseError(source_ + ": " + message);
  throw ParseError(source_ + ":" + std::to_string(line) + ": " + message);
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

// ---------------------------------------------------------------------------

RunConfig parse_run_config(const ConfigFile& f) {
  for (const std::string& s : f.sections()) {
    if (s != "run" && s != "solver" && s != "oracle") {
      f.fail(f.section_line(s), "unknown section [" + s + "]");
    }
  }
  RunConfig rc;
  rc.base_dir = f.base_dir();
  if (auto v = f.text("run", "problem")) rc.problem = *v;
  if (auto v = f.text("run", "output_dir")) rc.output_dir = resolve_path(f.base_dir(), *v);
  if (auto v = f.boolean("run", "emit_plots")) rc.emit_plots = *v;
  if (const auto* e = f.find("run", "initial")) {
    const std::string v = *f.text("run", "initial");
    if (v == "default") {
      rc.initial.kind = InitialSpec::Kind::Default;
    } else if (v.rfind("mode ", 0) == 0) {
      int m = 0;
      const std::string n = trim(v.substr(5));
      const auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), m);
      if (ec != std::errc() || ptr != n.data() + n.size() || m < 1) {
        f.fail(*e, "initial: expected 'mode <i>' with i >= 1");
      }
      rc.initial.kind = InitialSpec::Kind::Mode;
      rc.initial.mode = m - 1;
    } else if (v.rfind("file ", 0) == 0) {
      rc.initial.kind = InitialSpec::Kind::File;
      rc.initial.path = resolve_path(f.base_dir(), trim(v.substr(5)));
    } else {
      f.fail(*e, "initial: expected 'default', 'mode <i>' or 'file <path>'");
    }
  }

  SolverConfig& s = rc.solver;
  if (auto v = f.number("solver", "epsilon")) s.epsilon = *v;
  if (auto v = f.number("solver", "omega")) s.omega = *v;
  if (auto v = f.number("solver", "gamma")) s.gamma = *v;
  if (auto v = f.integer("solver", "k0")) s.k0 = *v;
  if (auto v = f.integer("solver", "k_max")) s.k_max = *v;
  if (auto v = f.integer("solver", "fixed_k")) s.fixed_k = *v;
  if (auto v = f.integer("solver", "l_max")) s.l_max = *v;
  if (auto v = f.number("solver", "armijo_alpha")) s.armijo_alpha = *v;
  if (auto v = f.number("solver", "armijo_beta")) s.armijo_beta = *v;
  if (auto v = f.integer("solver", "max_iter")) s.max_iter = *v;
  if (auto v = f.integer("solver", "N")) s.N = *v;
  if (auto v = f.integer("solver", "substeps")) s.substeps = *v;
  if (auto v = f.number("solver", "stall_floor")) s.stall_floor = *v;
  if (auto v = f.number("solver", "neighborhood_radius")) s.neighborhood_radius = *v;
  if (auto v = f.integer("solver", "probe_cells")) s.probe_cells = *v;
  if (const auto* e = f.find("solver", "topology")) {
    try {
      s.topology = parse_topology(*f.text("solver", "topology"));
    } catch (const std::invalid_argument& err) {
      f.fail(*e, err.what());
    }
  }
  if (auto v = f.integer("oracle", "cells")) rc.oracle_cells = *v;
  if (auto v = f.number("oracle", "budget")) rc.oracle_budget = static_cast<long>(*v);

  f.reject_unused();
  try {
    s.validate();
  } catch (const std::invalid_argument& err) {
    // Anchor at the [solver] line that set the offending field, when there is one.
    const std::string msg = err.what();
    for (const std::string key : {"epsilon", "omega", "gamma", "k0", "k_max", "fixed_k", "l_max",
                                  "armijo_alpha", "armijo_beta", "max_iter", "N", "substeps",
                                  "stall_floor", "neighborhood_radius", "probe_cells"}) {
      const auto* e = f.find("solver", key);
      if (e && std::regex_search(msg, std::regex("\\b" + key + "\\b"))) f.fail(*e, msg);
    }
    throw ParseError(f.source() + ": " + msg);
  }
  if (rc.oracle_cells < 1) throw ParseError(f.source() + ": oracle cells must be >= 1");
  return rc;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(ConfigFile::load(path)); }

// ---------------------------------------------------------------------------

namespace {

struct AffineRow {
  double c = 0.0;
  VectorXd a;
};

AffineRow parse_affine(const ConfigFile& f, const ConfigFile::Entry& e,
                       const std::vector<std::string>& w, std::size_t from, int n_x) {
  if (w.size() - from != static_cast<std::size_t>(n_x) + 1) {
    f.fail(e, "expected " + std::to_string(n_x + 1) + " numbers (c a_1 .. a_" + std::to_string(n_x) + ")");
  }
  AffineRow r;
  r.a.resize(n_x);
  if (!to_double(w[from], r.c)) f.fail(e, "not a number: '" + w[from] + "'");
  for (int i = 0; i < n_x; ++i) {
    if (!to_double(w[from + 1 + i], r.a[i])) f.fail(e, "not a number: '" + w[from + 1 + i] + "'");
  }
  return r;
}

// One component of a mode: value and gradient in x.
struct Component {
  std::function<double(const VectorRef&)> value;
  std::function<void(const VectorRef&, Eigen::Ref<VectorXd>)> gradient;
};

Component parse_component(const ConfigFile& f, const ConfigFile::Entry& e, int n_x) {
  const auto w = words(e.value);
  if (w[0] == "linear") {
    const AffineRow r = parse_affine(f, e, w, 1, n_x);
    return {[r](const VectorRef& x) { return r.c + r.a.dot(x); },
            [r](const VectorRef&, Eigen::Ref<VectorXd> g) { g = r.a; }};
  }
  if (w[0] != "piecewise") f.fail(e, "expected 'linear' or 'piecewise', got '" + w[0] + "'");
  if (w.size() < 2 || w[1].size() < 2 || w[1][0] != 'x') f.fail(e, "piecewise needs a variable x<m>");
  int var = 0;
  const auto [ptr, ec] = std::from_chars(w[1].data() + 1, w[1].data() + w[1].size(), var);
  if (ec != std::errc() || ptr != w[1].data() + w[1].size() || var < 1 || var > n_x) {
    f.fail(e, "piecewise variable must be x1 .. x" + std::to_string(n_x));
  }
  const auto bar = std::find(w.begin(), w.end(), "|");
  if (bar == w.end()) f.fail(e, "piecewise needs '|' between breakpoints and branches");
  std::vector<double> breaks;
  for (auto it = w.begin() + 2; it != bar; ++it) {
    double b = 0.0;
    if (!to_double(*it, b)) f.fail(e, "not a number: '" + *it + "'");
    if (!breaks.empty() && b <= breaks.back()) f.fail(e, "breakpoints must increase");
    breaks.push_back(b);
  }
  std::vector<Branch> branches;
  std::vector<double> pair;
  auto flush = [&] {
    if (pair.size() != 2) f.fail(e, "each branch needs 'c s'");
    const double c = pair[0], s = pair[1];
    branches.push_back({[c, s](double x) { return c + s * x; }, [s](double) { return s; }});
    pair.clear();
  };
  for (auto it = bar + 1; it != w.end(); ++it) {
    if (*it == ";") {
      flush();
      continue;
    }
    double v = 0.0;
    if (!to_double(*it, v)) f.fail(e, "not a number: '" + *it + "'");
    pair.push_back(v);
  }
  flush();
  if (branches.size() != breaks.size() + 1) {
    f.fail(e, std::to_string(breaks.size()) + " breakpoints need " + std::to_string(breaks.size() + 1) +
                  " branches, got " + std::to_string(branches.size()));
  }
  const PiecewiseScalar q(std::move(breaks), std::move(branches));
  const int m = var - 1;
  return {[q, m](const VectorRef& x) { return q(x[m]); },
          [q, m](const VectorRef& x, Eigen::Ref<VectorXd> g) {
            g.setZero();
            g[m] = q.derivative(x[m]);
          }};
}

}  // namespace

SwitchedProblem parse_problem(const ConfigFile& f) {
  if (!f.has_section("problem")) f.fail(0, "missing [problem] section");
  SwitchedProblem p;
  p.name = f.text("problem", "name").value_or(std::filesystem::path(f.source()).stem().string());
  const auto* nx_entry = f.find("problem", "n_x");
  if (!nx_entry) f.fail(f.section_line("problem"), "[problem] needs n_x");
  p.n_x = *f.integer("problem", "n_x");
  if (p.n_x < 1) f.fail(*nx_entry, "n_x must be >= 1");
  const auto* tf_entry = f.find("problem", "t_f");
  if (!tf_entry) f.fail(f.section_line("problem"), "[problem] needs t_f");
  p.t_f = *f.number("problem", "t_f");
  if (!(p.t_f > 0.0)) f.fail(*tf_entry, "t_f must be > 0");
  if (const auto* e = f.find("problem", "x0")) {
    const auto v = *f.numbers("problem", "x0");
    if (static_cast<int>(v.size()) != p.n_x) f.fail(*e, "x0 needs n_x numbers");
    p.x0 = Eigen::Map<const VectorXd>(v.data(), p.n_x);
  } else {
    p.x0 = VectorXd::Zero(p.n_x);
  }

  const auto* cost_entry = f.find("problem", "cost");
  if (!cost_entry) f.fail(f.section_line("problem"), "[problem] needs cost");
  const auto cw = words(*f.text("problem", "cost"));
  if (static_cast<int>(cw.size()) != p.n_x + 1) f.fail(*cost_entry, "cost: expected '<kind> target_1 .. target_n_x'");
  VectorXd target(p.n_x);
  for (int i = 0; i < p.n_x; ++i) {
    if (!to_double(cw[1 + i], target[i])) f.fail(*cost_entry, "not a number: '" + cw[1 + i] + "'");
  }
  if (cw[0] == "distance") {
    p.cost = distance_cost(target);
  } else if (cw[0] == "quadratic") {
    p.cost = quadratic_cost(target);
  } else {
    f.fail(*cost_entry, "cost kind must be 'distance' or 'quadratic'");
  }

  for (int j = 1;; ++j) {
    const auto* e = f.find("problem", "constraint." + std::to_string(j));
    if (!e) break;
    f.text("problem", e->key);
    const AffineRow r = parse_affine(f, *e, words(e->value), 0, p.n_x);
    p.constraints.push_back([r](const VectorRef& x) { return r.c + r.a.dot(x); });
  }

  for (const std::string& s : f.sections()) {
    if (s != "problem" && s.rfind("mode.", 0) != 0) f.fail(f.section_line(s), "unknown section [" + s + "]");
  }
  for (int i = 1;; ++i) {
    const std::string sec = "mode." + std::to_string(i);
    if (!f.has_section(sec)) break;
    std::vector<Component> comps;
    for (int j = 1; j <= p.n_x; ++j) {
      const auto* e = f.find(sec, "f." + std::to_string(j));
      if (!e) f.fail(f.section_line(sec), "[" + sec + "] needs f." + std::to_string(j));
      f.text(sec, e->key);
      comps.push_back(parse_component(f, *e, p.n_x));
    }
    p.modes.push_back([comps](double, const VectorRef& x, const VectorRef&, Eigen::Ref<VectorXd> out) {
      for (std::size_t j = 0; j < comps.size(); ++j) out[j] = comps[j].value(x);
    });
    p.mode_jacobians.push_back(
        [comps](double, const VectorRef& x, const VectorRef&, Eigen::Ref<MatrixXd> out) {
          VectorXd g(x.size());
          for (std::size_t j = 0; j < comps.size(); ++j) {
            comps[j].gradient(x, g);
            out.row(j) = g.transpose();
          }
        });
  }
  p.n_sigma = static_cast<int>(p.modes.size());
  if (p.n_sigma < 1) f.fail(0, "no [mode.1] section");
  f.reject_unused();
  p.validate();
  return p;
}

SwitchedProblem load_problem(const std::string& spec, const std::string& base_dir) {
  const auto names = builtin_problem_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return problem_by_name(spec);
  const std::string path = resolve_path(base_dir, spec);
  if (!std::filesystem::exists(path)) {
    throw ParseError("unknown problem '" + spec + "' (not a built-in name and no file " + path + ")");
  }
  return parse_problem(ConfigFile::load(path));
}

}  // namespace swopt
