#pragma once

#include "lrcs/estimators.hpp"

#include <vector>

namespace lrcs {

enum class Weighting { adaptive, classical };

struct LrConfig {
  ObservationModel model = ObservationModel::gaussian(1.0);
  double radius = 1.0;  // B, Theta is the closed B-ball
  double lambda = 1.0;
  double alpha = 0.1;
  Weighting weighting = Weighting::adaptive;
  bool estimator_uses_weights = false;  // FTRL fits every past round at weight 1
  bool vaw = false;  // Vovk-Azoury-Warmuth estimator sequence (GLMs only)
  SolverOptions solver{};
};

struct Round {
  Vector x;
  double y = 0;
  double w = 1;
  Vector theta_hat;  // fitted on earlier rounds only
  double est_nll = 0;  // w * nll(x'theta_hat, y)
  bool solver_converged = true;
};

struct MembershipThreshold {
  double log_alpha_inv;
  double cum_est_nll;
  double total() const { return log_alpha_inv + cum_est_nll; }
};

struct InfeasibleSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class LrState {
 public:
  LrState(LrConfig cfg, Index dim);

  const LrConfig& config() const { return cfg_; }
  const ObservationModel& model() const { return cfg_.model; }
  Index dim() const { return dim_; }
  Index size() const { return data_.size(); }
  const std::vector<Round>& rounds() const { return rounds_; }
  const Dataset& data() const { return data_; }
  CurvatureConstants curvature() const { return curv_; }

  double cum_est_nll() const { return cum_est_nll_; }
  double log_alpha_inv() const;
  MembershipThreshold threshold() const { return {log_alpha_inv(), cum_est_nll_}; }

  // sum mu x x' + lambda I with the unweighted rounds
  const Matrix& design() const { return design_; }
  // sum w x x'
  const Matrix& weighted_gram() const { return gram_w_; }
  // sum w T(y) x; zero for non-GLM models
  const Vector& suff_stat() const { return suff_; }

  // Ridge/FTRL estimate on all rounds so far. It is the next round's
  // theta_hat unless the VAW variant is on, and always lies in the set.
  const Estimate& current_estimate() const { return current_; }

  double bias_bound(const Vector& x) const;
  double adaptive_weight(const Vector& x) const;

  // The weight only sees x; y enters after theta_hat and w are fixed.
  void update(const Vector& x, double y);

  // Sum of w_s * nll(x_s'theta, y_s) over the history.
  double weighted_nll(const Vector& theta) const;
  double log_ratio(const Vector& theta) const { return weighted_nll(theta) - cum_est_nll_; }
  bool contains(const Vector& theta) const;

  // Re-append a round with stored estimator output (snapshot restore).
  void restore_round(const Round& r);

 private:
  void append(Round r);
  void refit_current();

  LrConfig cfg_;
  Index dim_;
  CurvatureConstants curv_;
  std::vector<Round> rounds_;
  Dataset data_;
  double cum_est_nll_ = 0;
  Matrix design_;
  Eigen::LLT<Matrix> design_llt_;
  Matrix gram_w_;
  Vector suff_;
  Estimate current_;
};

double bias_bound(const LrState& state, const Vector& x);
double adaptive_weight(const LrState& state, const Vector& x);
LrState update(LrState state, const Vector& x, double y);
double log_ratio(const LrState& state, const Vector& theta);
bool membership(const LrState& state, const Vector& theta);

}  // namespace lrcs
