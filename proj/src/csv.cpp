#include "lrcs/csv.hpp"

#include <cstdio>

namespace lrcs {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_run_csv(std::ostream& out, const std::vector<RunResult>& runs, bool report_bounds) {
  out << "seed,round,method,action,regret,cum_regret,threshold,weight,covered";
  if (report_bounds) out << ",bound_t4,bound_t6";
  out << '\n';
  for (const RunResult& r : runs) {
    const std::string name = method_name(r.method);
    for (std::size_t t = 0; t < r.rounds.size(); ++t) {
      const RoundRecord& rec = r.rounds[t];
      out << r.seed << ',' << t + 1 << ',' << name << ',' << rec.action << ',' << format_double(rec.regret) << ','
          << format_double(rec.cum_regret) << ',' << format_double(rec.threshold) << ','
          << format_double(rec.weight) << ',' << (rec.covered ? 1 : 0);
      if (report_bounds) out << ',' << format_double(rec.bound_t4) << ',' << format_double(rec.bound_t6);
      out << '\n';
    }
  }
}

void write_calibration_csv(std::ostream& out, const std::vector<CalibrationRow>& rows) {
  out << "method,alpha,scenario,runs,covered_fraction\n";
  for (const CalibrationRow& r : rows)
    out << method_name(r.method) << ',' << format_double(r.alpha) << ',' << r.scenario << ',' << r.runs << ','
        << format_double(r.covered_fraction) << '\n';
}

}  // namespace lrcs
