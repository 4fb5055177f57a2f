#pragma once

#include "lrcs/baselines.hpp"
#include "lrcs/confidence_core.hpp"
#include "lrcs/kernel_features.hpp"
#include "lrcs/ucb.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace lrcs {

struct BanditEnvironment {
  std::vector<Vector> actions;
  Vector theta_star;
  ObservationModel model = ObservationModel::gaussian(1.0);
  double optimal_value = 0;
  Index optimal_action = 0;
  // payoff values were multiplied by this so that ||theta*|| fits the ball
  double payoff_scale = 1.0;
  double feature_scale = 1.0;
  std::string description;

  Index dim() const { return theta_star.size(); }
};

// Checks ||a|| <= 1 and fills in the optimum.
BanditEnvironment make_environment(std::vector<Vector> actions, Vector theta_star, ObservationModel model);

struct KernelEnvSpec {
  Benchmark benchmark = Benchmark::f4_1d;
  double lengthscale = 0.06;
  Index grid_size = 64;  // points per input dimension
  double B = 4.0;
};
BanditEnvironment kernel_environment(const KernelEnvSpec& spec, ObservationModel model);

struct LinearEnvSpec {
  Index dim = 2;
  Index n_actions = 16;
  double theta_norm = 1.0;
  std::uint64_t seed = 0;
};
// Actions uniform on the unit sphere, theta* a random direction of the given norm.
BanditEnvironment random_linear_environment(const LinearEnvSpec& spec, ObservationModel model);

enum class Method { lr_weighted, lr_classical, ay2011, subexp, heuristic, poisson_laplace, poisson_worstcase };

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);
bool is_lr(Method m);

struct MethodSettings {
  double alpha = 0.1;  // LR sets
  double delta = 0.1;  // ellipsoids and theory bounds
  double lambda = 1.0;
  double B = 1.0;
  bool estimator_uses_weights = false;  // FTRL fits every past round at weight 1
  bool vaw = false;
  double subexp_k = 0.5;
  double subexp_nu = 0;  // 0 picks the model default
  SolverOptions solver{};
  UcbOptions ucb{};
};

struct RunOptions {
  int horizon = 200;
  double round_time_budget = 5.0;  // seconds; <= 0 disables the guard
  bool report_bounds = false;
  bool prune = true;  // skip exact UCB solves that cannot win
};

struct RoundRecord {
  Index action = 0;
  double reward = 0;
  double regret = 0;
  double cum_regret = 0;
  double threshold = 0;  // LR: log(1/alpha) + cumulative estimator loss; ellipsoids: beta
  double weight = 1;
  bool covered = true;  // latched: false from the first round theta* left the set
  double ucb = 0;       // optimistic value of the chosen action
  double seconds = 0;
  int exact_solves = 0;
  double bound_t4 = std::numeric_limits<double>::quiet_NaN();
  double bound_t6 = std::numeric_limits<double>::quiet_NaN();
};

struct RunResult {
  std::uint64_t seed = 0;
  Method method = Method::lr_weighted;
  std::vector<RoundRecord> rounds;
  bool failed = false;
  std::string error;
};

RunResult run_ucb(const BanditEnvironment& env, Method method, const MethodSettings& settings,
                  const RunOptions& opt, std::uint64_t seed);

enum class Covariates { adaptive, iid };
enum class ThetaKind { zero, random };

struct CalibrationScenario {
  Covariates covariates = Covariates::adaptive;
  ThetaKind theta = ThetaKind::random;
  Index dim = 2;
  Index n_actions = 16;
  double theta_norm = 1.0;
};
std::string scenario_name(const CalibrationScenario& s);

struct CalibrationResult {
  int runs = 0;
  int covered = 0;
  int failed = 0;
  double fraction() const { return runs > 0 ? static_cast<double>(covered) / runs : 0.0; }
};

// Fraction of runs in which theta* stays in the set at every round up to the horizon.
// Each run draws its own theta* and action set from base_seed + run.
CalibrationResult run_calibration(const CalibrationScenario& scenario, const ObservationModel& model, Method method,
                                  const MethodSettings& settings, int horizon, int runs, std::uint64_t base_seed);

struct SweepJob {
  Method method;
  std::uint64_t seed;
};

// Runs every (method, seed) pair, in parallel when jobs > 1. Results come back
// ordered by method (as listed) then seed, whatever the execution order.
std::vector<RunResult> sweep(const BanditEnvironment& env, const std::vector<Method>& methods,
                             const MethodSettings& settings, const RunOptions& opt, std::uint64_t base_seed,
                             int n_seeds, int jobs = 1);

// Per-round median of cumulative regret over runs of one method.
std::vector<double> median_cumulative_regret(const std::vector<RunResult>& runs, Method method);

}  // namespace lrcs
