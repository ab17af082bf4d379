#pragma once

#include <string>
#include <vector>

namespace efit {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick invariant suite behind `efit check`: coarse grids, a few seconds.
std::vector<CheckResult> run_property_checks();

}  // namespace efit
