#include "lrcs/baselines.hpp"

#include <cmath>

namespace lrcs {

namespace {

double log_det_spd(const Matrix& A) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw std::runtime_error("ellipsoid matrix is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

bool EllipsoidSet::contains(const Vector& theta) const {
  const Vector d = theta - center;
  return d.dot(V * d) <= beta;
}

double sub_gaussian_radius(const Matrix& V, double lambda, double sigma, double B, double delta) {
  const double logdet = log_det_spd(V) - V.rows() * std::log(lambda);
  return std::sqrt(lambda) * B + sigma * std::sqrt(2.0 * std::log(1.0 / delta) + logdet);
}

double sub_exponential_radius(const Matrix& V, double lambda, double k, double B, double delta,
                              double theta_norm) {
  if (!(k > 0 && k < 1)) throw std::invalid_argument("sub-exponential k must lie in (0, 1)");
  const double d = static_cast<double>(V.rows());
  const double sl = std::sqrt(lambda);
  const double skb = sl * k * B;
  // log( det(V)^{1/2} / (delta det(sqrt(lambda) I)) )
  const double logterm = 0.5 * log_det_spd(V) - std::log(delta) - 0.5 * d * std::log(lambda);
  return sl * theta_norm + skb + d / skb * std::log(1.0 / (1.0 - k)) + logterm / skb;
}

double heuristic_beta(double delta) { return 2.0 * std::log(1.0 / delta); }

Matrix poisson_heuristic_matrix(PoissonVariant kind, const Dataset& data, const Vector& theta_hat,
                                double B, double lambda) {
  const auto X = data.covariates();
  Vector c(data.size());
  if (kind == PoissonVariant::laplace) c = (X * theta_hat).array().exp();
  else c.setConstant(std::exp(B));
  Matrix V = X.transpose() * (c.asDiagonal() * X);
  V.diagonal().array() += lambda;
  return V;
}

double ellipsoid_ucb(const EllipsoidSet& set, const Vector& x) {
  const double q = x.dot(set.V.llt().solve(x));
  return x.dot(set.center) + std::sqrt(set.beta) * std::sqrt(std::max(0.0, q));
}

GumbelResponse gumbel_transform(double t, double p) {
  if (!(t > 0)) throw DomainError("gumbel_transform: survival time must be positive");
  if (!(p >= 1)) throw std::invalid_argument("gumbel_transform: shape p must be >= 1");
  return {std::log(t), euler_gamma};
}

double default_subexp_scale(const ObservationModel& model) {
  switch (model.kind()) {
    case ObservationModel::Kind::laplace:
      // variance proxy 2 b^2
      return std::sqrt(2.0) * std::get<LaplaceSpec>(model.spec()).b;
    case ObservationModel::Kind::gaussian:
      return model.glm().sigma;
    default:
      // unit-scale Gumbel noise after the log transform
      return 1.0;
  }
}

EllipsoidTracker::EllipsoidTracker(EllipsoidParams params, ObservationModel model, Index dim)
    : p_(params), model_(std::move(model)), dim_(dim), data_(dim) {
  gram_ = Matrix::Zero(dim, dim);
  xr_ = Vector::Zero(dim);
  switch (p_.kind) {
    case EllipsoidKind::sub_gaussian:
      noise_scale_ = model_.kind() == ObservationModel::Kind::gaussian ? model_.glm().sigma
                                                                       : default_subexp_scale(model_);
      break;
    case EllipsoidKind::sub_exponential:
      noise_scale_ = p_.subexp_nu > 0 ? p_.subexp_nu : default_subexp_scale(model_);
      break;
    case EllipsoidKind::heuristic:
      noise_scale_ = model_.kind() == ObservationModel::Kind::laplace ? default_subexp_scale(model_)
                     : model_.kind() == ObservationModel::Kind::gaussian ? model_.glm().sigma
                                                                         : 1.0;
      break;
    default:
      if (model_.kind() != ObservationModel::Kind::poisson)
        throw UnsupportedModel("Poisson heuristic sets need the poisson model, got " + model_.name());
      break;
  }
  rebuild();
}

bool EllipsoidTracker::uses_likelihood_center() const {
  if (p_.kind == EllipsoidKind::poisson_laplace || p_.kind == EllipsoidKind::poisson_worst_case) return true;
  if (p_.kind != EllipsoidKind::heuristic) return false;
  const auto k = model_.kind();
  return k == ObservationModel::Kind::poisson || k == ObservationModel::Kind::bernoulli ||
         k == ObservationModel::Kind::weibull;
}

double EllipsoidTracker::regression_response(double y) const {
  if (model_.kind() == ObservationModel::Kind::weibull) {
    const double p = std::get<WeibullSurvivalSpec>(model_.spec()).p;
    const GumbelResponse g = gumbel_transform(y, p);
    return -p * g.y - g.mean_offset;
  }
  return y;
}

void EllipsoidTracker::update(const Vector& x, double y) {
  require_dim(x.size(), dim_, "EllipsoidTracker::update");
  model_.check_support(y);
  data_.append(x, y, 1.0);
  gram_.noalias() += x * x.transpose();
  xr_ += regression_response(y) * x;
  rebuild();
}

void EllipsoidTracker::rebuild() {
  const double lambda = p_.lambda;
  const double s2 = noise_scale_ * noise_scale_;
  Matrix V;
  Vector center;
  if (uses_likelihood_center()) {
    const Estimate e = ftrl_fit(model_, data_, Regularizer::ridge(lambda), p_.B, warm_, p_.solver, false);
    warm_ = e.theta;
    center = e.theta;
    if (p_.kind == EllipsoidKind::poisson_worst_case) {
      V = poisson_heuristic_matrix(PoissonVariant::worst_case, data_, center, p_.B, lambda);
    } else {
      // Laplace approximation: curvature of the unweighted NLL at the penalized MLE
      const auto X = data_.covariates();
      const Vector z = X * center;
      Vector c(data_.size());
      for (Index i = 0; i < c.size(); ++i) c[i] = model_.solver_loss(z[i], data_.responses()[i]).curvature;
      V = X.transpose() * (c.asDiagonal() * X);
      V.diagonal().array() += lambda;
    }
  } else {
    // sub-Gaussian set follows the unit-design convention; the others scale by the noise
    const double scale = p_.kind == EllipsoidKind::sub_gaussian ? 1.0 : s2;
    V = gram_ / scale;
    V.diagonal().array() += lambda;
    center = V.llt().solve(xr_ / scale);
  }

  set_.center = center;
  set_.V = V;
  switch (p_.kind) {
    case EllipsoidKind::sub_gaussian: {
      const double r = sub_gaussian_radius(V, lambda, noise_scale_, p_.B, p_.delta);
      set_.beta = r * r;
      set_.provable = model_.kind() == ObservationModel::Kind::gaussian;
      break;
    }
    case EllipsoidKind::sub_exponential: {
      const double r = sub_exponential_radius(V, lambda, p_.subexp_k, p_.B, p_.delta, p_.B);
      set_.beta = r * r;
      set_.provable = true;
      break;
    }
    default:
      set_.beta = heuristic_beta(p_.delta);
      set_.provable = false;
      break;
  }
  llt_.compute(V);
}

double EllipsoidTracker::ucb(const Vector& x) const {
  const double q = x.dot(llt_.solve(x));
  return x.dot(set_.center) + std::sqrt(set_.beta) * std::sqrt(std::max(0.0, q));
}

}  // namespace lrcs
