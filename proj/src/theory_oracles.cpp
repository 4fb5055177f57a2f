#include "lrcs/theory_oracles.hpp"

#include <cmath>

namespace lrcs {

namespace {

double log_det_spd(const Matrix& A) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw std::runtime_error("log_det_spd: matrix not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

void check_weights(const std::vector<Vector>& xs, std::span<const double> ws) {
  if (xs.size() != ws.size()) throw DimensionError("covariate and weight lists differ in length");
}

}  // namespace

GainLedger information_gain(const std::vector<Vector>& xs, double mu, double lambda, Index dim) {
  if (!(lambda > 0) || !(mu > 0)) throw std::invalid_argument("information_gain: mu, lambda must be positive");
  GainLedger g;
  g.lambda = lambda;
  g.V = lambda * Matrix::Identity(dim, dim);
  Matrix Vinv = Matrix::Identity(dim, dim) / lambda;
  for (const Vector& x : xs) {
    require_dim(x.size(), dim, "information_gain");
    const Vector vx = Vinv * x;
    const double q = mu * x.dot(vx);
    g.increments.push_back(std::log1p(q));
    g.V.noalias() += mu * x * x.transpose();
    Vinv.noalias() -= (mu / (1.0 + q)) * vx * vx.transpose();
  }
  g.gamma = xs.empty() ? 0.0 : log_det_spd(g.V) - dim * std::log(lambda);
  return g;
}

double log_partition_sum(const ObservationModel& model, const std::vector<Vector>& xs,
                         std::span<const double> ws, double nu, const Vector& theta, Vector* grad) {
  check_weights(xs, ws);
  const GlmSpec& m = model.glm();
  double z = 0.5 * nu * theta.squaredNorm();
  if (grad) *grad = nu * theta;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double s = xs[i].dot(theta);
    z += ws[i] * log_partition(m, s);
    if (grad) *grad += ws[i] * log_partition_d1(m, s) * xs[i];
  }
  return z;
}

double bregman_divergence(const ObservationModel& model, const std::vector<Vector>& xs,
                          std::span<const double> ws, double nu, const Vector& theta1,
                          const Vector& theta2) {
  check_weights(xs, ws);
  const GlmSpec& m = model.glm();
  double d = 0.5 * nu * (theta1 - theta2).squaredNorm();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double a = xs[i].dot(theta1), b = xs[i].dot(theta2);
    d += ws[i] * (log_partition(m, a) - log_partition(m, b) - log_partition_d1(m, b) * (a - b));
  }
  return d;
}

double bregman_information_gain(const ObservationModel& model, const std::vector<Vector>& xs,
                                std::span<const double> ws, double nu, Index dim) {
  check_weights(xs, ws);
  if (model.kind() != ObservationModel::Kind::gaussian)
    throw UnsupportedModel("Bregman information gain has a closed form only for the Gaussian model, not " +
                           model.name());
  const double s2 = model.glm().sigma * model.glm().sigma;
  Matrix W = nu * Matrix::Identity(dim, dim);
  for (std::size_t i = 0; i < xs.size(); ++i) W.noalias() += (ws[i] / s2) * xs[i] * xs[i].transpose();
  return log_det_spd(W) - dim * std::log(nu);
}

double bregman_radius_bound(double L, double mu, double alpha, double delta, double nu, double B,
                            double gamma_bregman, double regret) {
  const double xi = std::log(1.0 / alpha) + nu * B * B + gamma_bregman;
  return 4.0 * L / mu * xi + 2.0 * std::log(1.0 / delta) + 2.0 * regret;
}

double ftrl_regret_bound(double lambda, double B, double L, double mu, double gamma, double delta) {
  return lambda * B * B + L / mu * (gamma + 2.0 * std::log(1.0 / delta)) + 2.0 * L * L * B * B / mu * gamma;
}

double vaw_regret_bound(double lambda, double B, double L, double mu, double gamma, double delta,
                        std::span<const double> bias_sq, std::span<const double> dgamma) {
  if (bias_sq.size() != dgamma.size())
    throw DimensionError("vaw_regret_bound: bias and information-gain lists differ in length");
  double acc = 0;
  for (std::size_t s = 0; s < bias_sq.size(); ++s) {
    if (std::isinf(bias_sq[s])) continue;  // the summand vanishes in the limit
    acc += B * B / (1.0 / L + bias_sq[s]) * dgamma[s];
  }
  return lambda * B * B + 2.0 * L / mu * (gamma + std::log(1.0 / delta)) + L / mu * acc;
}

double linear_bandit_beta(double lambda, double B, double sigma, double gamma, double delta) {
  return 16.0 * std::log(1.0 / delta) + 12.0 * lambda * B * B + 8.0 * (B * B / (sigma * sigma) + 1.0) * gamma;
}

double linear_bandit_regret_bound(double t, double gamma, double sigma, double lambda, double B,
                                  double delta) {
  return 6.0 * std::sqrt(t * gamma) *
         (sigma * std::sqrt(std::log(1.0 / delta) + gamma) + sigma * std::sqrt(lambda) * B + B * std::sqrt(gamma));
}

PotentialCheck elliptical_potential_check(const std::vector<Vector>& us, double lambda, Index dim) {
  PotentialCheck out;
  if (us.empty()) return out;
  Matrix V = lambda * Matrix::Identity(dim, dim);
  double r = 0;
  for (const Vector& u : us) {
    require_dim(u.size(), dim, "elliptical_potential_check");
    V.noalias() += u * u.transpose();
    out.lhs += u.dot(V.llt().solve(u));
    r = std::max(r, u.norm());
  }
  out.log_det_ratio = log_det_spd(V) - dim * std::log(lambda);
  out.dimension_bound = dim * std::log(r * r * static_cast<double>(us.size()) / lambda + 1.0);
  return out;
}

}  // namespace lrcs
