#pragma once

#include "swopt/io.hpp"
#include "swopt/model.hpp"
#include "swopt/solver_config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace swopt {

/**
 * Flat sectioned key-value text:
 *
 *   # comment
 *   [section]
 *   key = value   # trailing comment
 *
 * Keys live inside a section and may appear once per section. Values are raw text;
 * the typed accessors below report errors as "source:line: ...".
 */
class ConfigFile {
 public:
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
    mutable bool used = false;
  };

  static ConfigFile parse(std::istream& is, const std::string& source);
  static ConfigFile load(const std::string& path);

  const std::string& source() const { return source_; }
  /// Directory relative paths inside the file resolve against.
  const std::string& base_dir() const { return base_dir_; }
  const std::vector<std::string>& sections() const { return sections_; }
  bool has_section(const std::string& section) const;
  /// Line of the section header, 0 when absent.
  int section_line(const std::string& section) const;

  const Entry* find(const std::string& section, const std::string& key) const;
  std::optional<std::string> text(const std::string& section, const std::string& key) const;
  std::optional<double> number(const std::string& section, const std::string& key) const;
  std::optional<int> integer(const std::string& section, const std::string& key) const;
  std::optional<bool> boolean(const std::string& section, const std::string& key) const;
  std::optional<std::vector<double>> numbers(const std::string& section, const std::string& key) const;

  /// Throws on the first entry no accessor has read (unknown key).
  void reject_unused() const;
  [[noreturn]] void fail(const Entry& e, const std::string& message) const;
  [[noreturn]] void fail(int line, const std::string& message) const;

 private:
  std::string source_;
  std::string base_dir_;
  std::vector<std::string> sections_;
  std::vector<int> section_lines_;
  std::vector<Entry> entries_;
};

/// How the initial pure signal of a solve is built.
struct InitialSpec {
  enum class Kind { Default, Mode, File } kind = Kind::Default;
  int mode = 0;      ///< zero-based, for Kind::Mode
  std::string path;  ///< for Kind::File
};

struct RunConfig {
  std::string problem = "paper_example";  ///< built-in name or problem file path
  InitialSpec initial;
  SolverConfig solver;
  std::string output_dir = "out";
  bool emit_plots = true;
  int oracle_cells = 8;
  long oracle_budget = 1'000'000;
  std::string base_dir = ".";
};

/// Sections [run], [solver], [oracle]; see README for the keys.
RunConfig parse_run_config(const ConfigFile& file);
RunConfig load_run_config(const std::string& path);

/**
 * A built-in problem name, or a problem file (resolved against base_dir):
 *
 *   [problem]
 *   name = ...           optional
 *   n_x = 2
 *   t_f = 2
 *   x0 = 0 0
 *   cost = distance 3 2 | quadratic 3 2
 *   constraint.1 = c a_1 .. a_nx        means c + a.x <= 0
 *   [mode.1]
 *   f.1 = linear c a_1 .. a_nx           c + a.x
 *   f.2 = piecewise x2 b_1 .. b_m | c_0 s_0 ; .. ; c_m s_m
 *
 * Piecewise rows give branch j the value c_j + s_j x on [b_j, b_{j+1}), so
 * derivatives at breakpoints are right-hand.
 */
SwitchedProblem load_problem(const std::string& spec, const std::string& base_dir = ".");
SwitchedProblem parse_problem(const ConfigFile& file);

/// Resolve `path` against `base_dir` unless it is absolute.
std::string resolve_path(const std::string& base_dir, const std::string& path);

}  // namespace swopt
