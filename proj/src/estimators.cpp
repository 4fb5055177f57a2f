#include "lrcs/estimators.hpp"

namespace lrcs {

void Dataset::append(const Vector& x, double y, double w) {
  require_dim(x.size(), dim_, "Dataset::append");
  x_.insert(x_.end(), x.data(), x.data() + dim_);
  y_.push_back(y);
  w_.push_back(w);
}

namespace {

void check_inputs(const Dataset& data, const Regularizer& reg, double radius) {
  if (!(reg.lambda > 0)) throw std::invalid_argument("regularizer lambda must be positive");
  if (!(radius > 0)) throw std::invalid_argument("ball radius must be positive");
  if (reg.pending_x) require_dim(reg.pending_x->size(), data.dim(), "pending covariate");
}

Objective make_objective(const ObservationModel& model, const Dataset& data, const Regularizer& reg,
                         bool use_weights, double smoothing) {
  if (reg.pending_x && !model.is_glm())
    throw UnsupportedModel("the VAW regularizer needs a log-partition function; " + model.name() +
                           " has none");
  return [&model, &data, &reg, use_weights, smoothing](const Vector& theta, Vector* grad, Matrix* hess) {
    const auto X = data.covariates();
    const auto y = data.responses();
    const auto w = data.weights();
    const Index t = data.size();
    const Vector z = X * theta;
    Vector c1(t), c2(t);
    double value = reg.lambda * theta.squaredNorm();
    for (Index i = 0; i < t; ++i) {
      const double wi = use_weights ? w[i] : 1.0;
      const LossDerivatives l = model.solver_loss(z[i], y[i], smoothing);
      value += wi * l.value;
      c1[i] = wi * l.d1;
      c2[i] = wi * l.curvature;
    }
    double pz = 0;
    if (reg.pending_x) {
      pz = reg.pending_x->dot(theta);
      value += log_partition(model.glm(), pz);
    }
    if (grad) {
      *grad = X.transpose() * c1 + 2 * reg.lambda * theta;
      if (reg.pending_x) *grad += log_partition_d1(model.glm(), pz) * *reg.pending_x;
    }
    if (hess) {
      hess->noalias() = X.transpose() * (c2.asDiagonal() * X);
      hess->diagonal().array() += 2 * reg.lambda;
      if (reg.pending_x)
        *hess += log_partition_d2(model.glm(), pz) * (*reg.pending_x) * reg.pending_x->transpose();
    }
    return value;
  };
}

}  // namespace

double ftrl_objective(const ObservationModel& model, const Dataset& data, const Regularizer& reg,
                      const Vector& theta, bool use_weights) {
  require_dim(theta.size(), data.dim(), "ftrl_objective theta");
  const auto X = data.covariates();
  const Vector z = X * theta;
  double value = reg.lambda * theta.squaredNorm();
  for (Index i = 0; i < data.size(); ++i)
    value += (use_weights ? data.weights()[i] : 1.0) * model.canonical_nll(z[i], data.responses()[i]);
  if (reg.pending_x) value += log_partition(model.glm(), reg.pending_x->dot(theta));
  return value;
}

Estimate ftrl_fit(const ObservationModel& model, const Dataset& data, const Regularizer& reg,
                  double radius, const std::optional<Vector>& warm_start, const SolverOptions& opt,
                  bool use_weights) {
  check_inputs(data, reg, radius);
  const Index d = data.dim();
  if (warm_start) require_dim(warm_start->size(), d, "warm start");
  if (data.empty() && !reg.pending_x) return {Vector::Zero(d), 0.0, 0.0, 0, true};

  const Vector start = warm_start ? *warm_start : Vector::Zero(d);
  BallSolution s;
  int iterations = 0;
  if (model.needs_continuation()) {
    Vector from = start;
    for (double eps : ObservationModel::laplace_continuation) {
      s = minimize_in_ball(make_objective(model, data, reg, use_weights, eps), radius, from, opt);
      iterations += s.iterations;
      from = s.theta;
    }
  } else {
    s = minimize_in_ball(make_objective(model, data, reg, use_weights, 0.0), radius, start, opt);
    iterations = s.iterations;
  }
  Estimate e{s.theta, 0.0, s.pg_norm, iterations, s.converged};
  e.objective = ftrl_objective(model, data, reg, e.theta, use_weights);
  return e;
}

Vector ridge_closed_form(const Dataset& data, double sigma, double lambda) {
  const Index d = data.dim();
  if (data.empty()) return Vector::Zero(d);
  const auto X = data.covariates();
  const auto w = data.weights();
  Matrix A = X.transpose() * (w.asDiagonal() * X) / (sigma * sigma);
  A.diagonal().array() += 2 * lambda;
  const Vector rhs = X.transpose() * (w.cwiseProduct(data.responses())) / (sigma * sigma);
  if (lambda > 0) return A.llt().solve(rhs);
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) throw std::runtime_error("ridge_closed_form: singular system with lambda = 0");
  return lu.solve(rhs);
}

}  // namespace lrcs
