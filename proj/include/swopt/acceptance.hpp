#pragma once

#include "swopt/model.hpp"

#include <string>
#include <vector>

namespace swopt {

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  /// Negate one q1 branch before running, to check that the suite notices.
  bool sabotage_q1 = false;
  /// When non-empty, solve artifacts of both example runs are written here.
  std::string artifact_dir;
};

struct AcceptanceReport {
  std::vector<CriterionResult> rows;
  bool all_passed() const;
};

/// The example problem with its q1 [0, 0.5) branch replaced by -2 + 4 x (a jump of 4 at 0).
SwitchedProblem sabotaged_example();

/// Runs every acceptance criterion on the example. Deterministic: no random engine,
/// no timings in the report text.
AcceptanceReport run_acceptance(const AcceptanceOptions& options);

/// One "PASS|FAIL  name  detail" line per criterion, then a summary line.
std::string format_report(const AcceptanceReport& report);

}  // namespace swopt
