#pragma once

#include <string>
#include <vector>

#include "qbrown/config.hpp"

namespace qbrown {

struct RunOptions {
  std::string out_dir = ".";
  int jobs = 1;
};

struct RunOutcome {
  int exit_code = 0;  ///< 0 success, 1 numerical failure or failed check, 2 config error
  std::string cause;
  std::vector<std::string> files;  ///< written into out_dir, manifest last
};

/// Runs one scenario, writing its CSVs and manifest.txt into out_dir.
/// Solver and config errors are caught and recorded in the manifest.
RunOutcome run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {});

/// Human-readable derived scales for `qbrown scales`.
std::string describe_scales(const PhysicalParams& p);

}  // namespace qbrown
