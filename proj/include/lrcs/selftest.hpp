#pragma once

#include <string>
#include <vector>

namespace lrcs {

enum class SelftestFault {
  none,
  // Assemble GLM densities with T(y) = y, dropping the 1/sigma^2 of the
  // Gaussian convention. Negative control: some property must fail.
  wrong_sufficient_statistic,
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Fast invariant suite behind `lrcs selftest`.
std::vector<PropertyResult> run_selftest(SelftestFault fault = SelftestFault::none);

}  // namespace lrcs
