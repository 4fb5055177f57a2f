#pragma once

#include "lrcs/bandit_sim.hpp"

#include <string>
#include <vector>

namespace lrcs {

// Bad config contents or an unreadable file. The CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::string family = "gaussian";  // gaussian | poisson | bernoulli | laplace | weibull
  double sigma = 0.15;
  double b = 0.15;
  double p = 2.0;
};
ObservationModel make_model(const ModelConfig& m);

struct EnvironmentConfig {
  std::string kind = "kernel";  // kernel | linear
  KernelEnvSpec kernel{};
  LinearEnvSpec linear{};
};

struct CalibrationConfig {
  int runs = 200;
  int horizon = 15;
  std::vector<double> alphas{0.1};
  std::vector<CalibrationScenario> scenarios;  // all four when left out of the file
  Index dim = 2;
  Index n_actions = 16;
  double theta_norm = 1.0;
};

// Defaults mirror the 1D row of the experiment table.
struct ExperimentConfig {
  ModelConfig model{};
  std::vector<Method> methods{Method::lr_weighted};
  MethodSettings settings{};
  RunOptions run{};
  EnvironmentConfig environment{};
  std::uint64_t base_seed = 0;
  int n_seeds = 10;
  std::string output;
  bool classical_weights = false;  // run lr_weighted entries with w = 1 (as lr_classical)
  CalibrationConfig calibration{};

  ExperimentConfig();
};

// Unknown keys, wrong types and out-of-range values all throw ConfigError.
// LRCS_SEED, when set, overrides seeds.base.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

BanditEnvironment build_environment(const ExperimentConfig& cfg);

// Methods to run after applying classical_weights.
std::vector<Method> effective_methods(const ExperimentConfig& cfg);

}  // namespace lrcs
