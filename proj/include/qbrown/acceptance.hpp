#pragma once

#include <string>
#include <vector>

namespace qbrown {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  ///< wall-time limit in seconds; exceeding it fails the criterion
};

/// Runs the numbered acceptance checks. quick skips everything budgeted
/// above 10 s; jobs > 1 runs criteria on that many threads.
std::vector<CriterionResult> run_acceptance(bool quick = false, int jobs = 1);

/// One line per criterion: "[PASS] 03 name (0.02 s / 1 s) detail".
std::string format_verdict(const CriterionResult& r);

/// True when no criterion failed (skipped ones do not count).
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace qbrown
