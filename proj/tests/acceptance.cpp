#include "swopt/acceptance.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  swopt::AcceptanceOptions options;
  if (argc > 1) options.artifact_dir = argv[1];
  const swopt::AcceptanceReport report = swopt::run_acceptance(options);
  std::cout << swopt::format_report(report);
  return report.all_passed() ? 0 : 1;
}
