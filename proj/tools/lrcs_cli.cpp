#include "lrcs/config.hpp"
#include "lrcs/csv.hpp"
#include "lrcs/selftest.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <thread>

using namespace lrcs;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRunFailure = 3;

// Opens --out, else the config's output path, else stdout.
class Output {
 public:
  Output(const std::string& flag, const std::string& from_config) {
    const std::string& path = flag.empty() ? from_config : flag;
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ConfigError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_run(const std::string& config_path, const std::string& out_flag, int jobs, bool report_bounds) {
  ExperimentConfig cfg = load_config(config_path);
  if (report_bounds) cfg.run.report_bounds = true;
  Output out(out_flag, cfg.output);
  const BanditEnvironment env = build_environment(cfg);
  std::cerr << "environment: " << env.description << "\n";

  const std::vector<RunResult> runs =
      sweep(env, effective_methods(cfg), cfg.settings, cfg.run, cfg.base_seed, cfg.n_seeds, jobs);
  write_run_csv(out.stream(), runs, cfg.run.report_bounds);
  out.stream().flush();

  int failed = 0;
  for (const RunResult& r : runs)
    if (r.failed) {
      ++failed;
      std::cerr << "run failed: method " << method_name(r.method) << " seed " << r.seed << ": " << r.error << "\n";
    }
  if (failed) {
    std::cerr << failed << " of " << runs.size() << " runs failed\n";
    return kRunFailure;
  }
  return kOk;
}

int cmd_calibrate(const std::string& config_path, const std::string& out_flag, int jobs) {
  const ExperimentConfig cfg = load_config(config_path);
  Output out(out_flag, cfg.output);
  const ObservationModel model = make_model(cfg.model);
  const CalibrationConfig& cal = cfg.calibration;

  struct Task {
    Method method;
    double alpha;
    CalibrationScenario scenario;
  };
  std::vector<Task> tasks;
  for (Method m : effective_methods(cfg))
    for (double a : cal.alphas)
      for (const CalibrationScenario& s : cal.scenarios) tasks.push_back({m, a, s});

  std::vector<CalibrationResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      MethodSettings s = cfg.settings;
      s.alpha = tasks[k].alpha;
      results[k] = run_calibration(tasks[k].scenario, model, tasks[k].method, s, cal.horizon, cal.runs, cfg.base_seed);
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<CalibrationRow> rows;
  int failed = 0;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    rows.push_back({tasks[k].method, tasks[k].alpha, scenario_name(tasks[k].scenario), results[k].runs,
                    results[k].fraction()});
    if (results[k].failed) {
      failed += results[k].failed;
      std::cerr << method_name(tasks[k].method) << " alpha " << tasks[k].alpha << " "
                << scenario_name(tasks[k].scenario) << ": " << results[k].failed << " runs failed\n";
    }
  }
  write_calibration_csv(out.stream(), rows);
  out.stream().flush();
  return failed ? kRunFailure : kOk;
}

int cmd_selftest(const std::string& fault) {
  SelftestFault f = SelftestFault::none;
  if (fault == "wrong-sufficient-statistic") f = SelftestFault::wrong_sufficient_statistic;
  else if (!fault.empty()) throw ConfigError("unknown fault '" + fault + "'");
  int failures = 0;
  for (const PropertyResult& r : run_selftest(f)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) std::cout << ": " << r.detail;
    std::cout << "\n";
    failures += !r.passed;
  }
  std::cout << (failures ? std::to_string(failures) + " properties failed" : std::string("all properties passed"))
            << "\n";
  return failures ? 1 : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood-ratio confidence sequences: bandit runs, calibration and self-checks"};
  app.require_subcommand(1);

  std::string config, out, fault;
  int jobs = 1;
  bool report_bounds = false;

  CLI::App* run = app.add_subcommand("run", "run the configured bandit sweep and write per-round CSV");
  run->add_option("--config", config, "experiment config (JSON)")->required();
  run->add_option("--out", out, "CSV path (default: config 'output', else stdout)");
  run->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  run->add_flag("--report-bounds", report_bounds, "add the FTRL and bandit regret bound columns");

  CLI::App* cal = app.add_subcommand("calibrate", "coverage of the confidence sets per method, alpha and scenario");
  cal->add_option("--config", config, "experiment config (JSON)")->required();
  cal->add_option("--out", out, "CSV path (default: config 'output', else stdout)");
  cal->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

  CLI::App* self = app.add_subcommand("selftest", "fast invariant suite");
  self->add_option("--inject-fault", fault, "negative control: wrong-sufficient-statistic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, out, jobs, report_bounds);
    if (*cal) return cmd_calibrate(config, out, jobs);
    return cmd_selftest(fault);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunFailure;
  }
}
