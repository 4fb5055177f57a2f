#pragma once

#include "lrcs/ball_solver.hpp"
#include "lrcs/observation_models.hpp"

#include <optional>
#include <vector>

namespace lrcs {

// Covariates stored row-major so the design matrix can be mapped without copying.
class Dataset {
 public:
  explicit Dataset(Index dim) : dim_(dim) {}

  void append(const Vector& x, double y, double w);

  Index dim() const { return dim_; }
  Index size() const { return static_cast<Index>(y_.size()); }
  bool empty() const { return y_.empty(); }

  Eigen::Map<const RowMatrix> covariates() const { return {x_.data(), size(), dim_}; }
  Eigen::Map<const Vector> responses() const { return {y_.data(), size()}; }
  Eigen::Map<const Vector> weights() const { return {w_.data(), size()}; }
  Vector row(Index i) const { return covariates().row(i).transpose(); }

 private:
  Index dim_;
  std::vector<double> x_, y_, w_;
};

struct Regularizer {
  double lambda = 1.0;
  std::optional<Vector> pending_x;  // set for the Vovk-Azoury-Warmuth variant

  static Regularizer ridge(double lambda) { return {lambda, std::nullopt}; }
  static Regularizer vaw(double lambda, Vector x) { return {lambda, std::move(x)}; }
};

struct Estimate {
  Vector theta;
  double objective = 0;
  double grad_norm = 0;  // projected
  int iterations = 0;
  bool converged = true;
};

// Objective: sum_s w_s nll(x_s'theta, y_s) + lambda ||theta||^2 [+ A(pending_x'theta)].
// With use_weights = false every w_s is read as 1.
double ftrl_objective(const ObservationModel& model, const Dataset& data, const Regularizer& reg,
                      const Vector& theta, bool use_weights = true);

Estimate ftrl_fit(const ObservationModel& model, const Dataset& data, const Regularizer& reg,
                  double radius, const std::optional<Vector>& warm_start = std::nullopt,
                  const SolverOptions& opt = {}, bool use_weights = true);

// (sum w x x'/sigma^2 + 2 lambda I)^{-1} sum w x y/sigma^2
Vector ridge_closed_form(const Dataset& data, double sigma, double lambda);

}  // namespace lrcs
