#include "lrcs/confidence_core.hpp"

#include <cmath>

namespace lrcs {

namespace {

// M += a x x', keeping M exactly symmetric
void symmetric_rank_one(Matrix& m, const Vector& x, double a) {
  m.selfadjointView<Eigen::Lower>().rankUpdate(x, a);
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
}

}  // namespace

LrState::LrState(LrConfig cfg, Index dim)
    : cfg_(std::move(cfg)), dim_(dim), data_(dim) {
  if (dim <= 0) throw DimensionError("LrState: dimension must be positive");
  if (!(cfg_.radius > 0)) throw std::invalid_argument("radius B must be positive");
  if (!(cfg_.lambda > 0)) throw std::invalid_argument("lambda must be positive");
  if (!(cfg_.alpha > 0 && cfg_.alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (cfg_.vaw && !cfg_.model.is_glm()) throw UnsupportedModel("VAW estimator needs a GLM");
  curv_ = cfg_.model.curvature(cfg_.radius);
  design_ = cfg_.lambda * Matrix::Identity(dim, dim);
  design_llt_.compute(design_);
  gram_w_ = Matrix::Zero(dim, dim);
  suff_ = Vector::Zero(dim);
  current_ = {Vector::Zero(dim), 0.0, 0.0, 0, true};
}

double LrState::log_alpha_inv() const { return -std::log(cfg_.alpha); }

double LrState::bias_bound(const Vector& x) const {
  require_dim(x.size(), dim_, "bias_bound");
  const double q = x.dot(design_llt_.solve(x));
  return std::max(0.0, 2 * cfg_.lambda * cfg_.radius * cfg_.radius * q);
}

double LrState::adaptive_weight(const Vector& x) const {
  if (cfg_.weighting == Weighting::classical) return 1.0;
  const double inv_l = 1.0 / curv_.L;
  return inv_l / (inv_l + bias_bound(x));
}

void LrState::update(const Vector& x, double y) {
  require_dim(x.size(), dim_, "update");
  cfg_.model.check_support(y);
  Round r;
  r.x = x;
  r.w = adaptive_weight(x);
  if (cfg_.vaw) {
    const Estimate e = ftrl_fit(cfg_.model, data_, Regularizer::vaw(cfg_.lambda, x), cfg_.radius,
                                current_.theta, cfg_.solver, cfg_.estimator_uses_weights);
    r.theta_hat = e.theta;
    r.solver_converged = e.converged;
  } else {
    r.theta_hat = current_.theta;
    r.solver_converged = current_.converged;
  }
  r.y = y;
  r.est_nll = r.w * cfg_.model.canonical_nll(x.dot(r.theta_hat), y);
  append(std::move(r));
  refit_current();
}

void LrState::restore_round(const Round& r) {
  require_dim(r.x.size(), dim_, "restore_round x");
  require_dim(r.theta_hat.size(), dim_, "restore_round theta_hat");
  append(r);
  refit_current();
}

void LrState::append(Round r) {
  data_.append(r.x, r.y, r.w);
  cum_est_nll_ += r.est_nll;
  symmetric_rank_one(design_, r.x, curv_.mu);
  design_llt_.compute(design_);
  symmetric_rank_one(gram_w_, r.x, r.w);
  if (cfg_.model.is_glm()) suff_ += r.w * sufficient_statistic(cfg_.model.glm(), r.y) * r.x;
  rounds_.push_back(std::move(r));
}

void LrState::refit_current() {
  current_ = ftrl_fit(cfg_.model, data_, Regularizer::ridge(cfg_.lambda), cfg_.radius, current_.theta,
                      cfg_.solver, cfg_.estimator_uses_weights);
}

double LrState::weighted_nll(const Vector& theta) const {
  require_dim(theta.size(), dim_, "log_ratio theta");
  if (data_.empty()) return 0.0;
  switch (cfg_.model.kind()) {
    case ObservationModel::Kind::gaussian: {
      const double s = cfg_.model.glm().sigma;
      return 0.5 * theta.dot(gram_w_ * theta) / (s * s) - theta.dot(suff_);
    }
    case ObservationModel::Kind::poisson:
    case ObservationModel::Kind::bernoulli: {
      const Vector z = data_.covariates() * theta;
      const auto w = data_.weights();
      double acc = 0;
      for (Index i = 0; i < z.size(); ++i) acc += w[i] * log_partition(cfg_.model.glm(), z[i]);
      return acc - theta.dot(suff_);
    }
    default: {
      const Vector z = data_.covariates() * theta;
      const auto w = data_.weights();
      const auto y = data_.responses();
      double acc = 0;
      for (Index i = 0; i < z.size(); ++i) acc += w[i] * cfg_.model.canonical_nll(z[i], y[i]);
      return acc;
    }
  }
}

bool LrState::contains(const Vector& theta) const {
  // one part in 1e12 of slack so solver output on the sphere is not rejected by rounding
  if (theta.norm() > cfg_.radius * (1 + 1e-12)) return false;
  return log_ratio(theta) <= log_alpha_inv();
}

double bias_bound(const LrState& state, const Vector& x) { return state.bias_bound(x); }
double adaptive_weight(const LrState& state, const Vector& x) { return state.adaptive_weight(x); }
LrState update(LrState state, const Vector& x, double y) {
  state.update(x, y);
  return state;
}
double log_ratio(const LrState& state, const Vector& theta) { return state.log_ratio(theta); }
bool membership(const LrState& state, const Vector& theta) { return state.contains(theta); }

}  // namespace lrcs
