#pragma once

#include "lrcs/bandit_sim.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace lrcs {

// 17 significant digits, so values survive a text round trip.
std::string format_double(double v);

// seed,round,method,action,regret,cum_regret,threshold,weight,covered[,bound_t4,bound_t6]
// Rounds are 1-based. Runs are written in the order given.
void write_run_csv(std::ostream& out, const std::vector<RunResult>& runs, bool report_bounds);

struct CalibrationRow {
  Method method;
  double alpha;
  std::string scenario;
  int runs;
  double covered_fraction;
};
void write_calibration_csv(std::ostream& out, const std::vector<CalibrationRow>& rows);

}  // namespace lrcs
