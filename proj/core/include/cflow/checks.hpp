#pragma once

#include <string>
#include <vector>

#include "cflow/config.hpp"

namespace cflow {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Runs the cross-module invariant suite on the configured scenario:
/// round-off-level structural identities plus a few stencil-scale checks
/// with grid-aware tolerances. Deterministic in cfg.seed.
std::vector<CheckResult> run_check_suite(const RunConfig& cfg);

} // namespace cflow
