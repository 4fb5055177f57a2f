#pragma once

#include "lrcs/estimators.hpp"

namespace lrcs {

inline constexpr double euler_gamma = 0.57721566490153286;

// {theta : ||theta - center||_V^2 <= beta}
struct EllipsoidSet {
  Vector center;
  Matrix V;
  double beta = 0;
  bool provable = false;

  bool contains(const Vector& theta) const;
};

// sqrt(beta) for sub-Gaussian noise, log-det form. V = sum x x' + lambda I.
double sub_gaussian_radius(const Matrix& V, double lambda, double sigma, double B, double delta);

// sqrt(beta) for sub-exponential noise; V = sum x x'/nu^2 + lambda I. The
// integration radius is taken to be B, and theta_norm bounds ||theta*||.
double sub_exponential_radius(const Matrix& V, double lambda, double k, double B, double delta,
                              double theta_norm);

// Fixed squared radius 2 log(1/delta); carries no coverage guarantee.
double heuristic_beta(double delta);

enum class PoissonVariant { laplace, worst_case };

// laplace: sum exp(theta_hat'x) x x' + lambda I; worst_case: sum exp(B) x x' + lambda I.
Matrix poisson_heuristic_matrix(PoissonVariant kind, const Dataset& data, const Vector& theta_hat,
                                double B, double lambda);

double ellipsoid_ucb(const EllipsoidSet& set, const Vector& x);

struct GumbelResponse {
  double y;            // log t
  double mean_offset;  // euler_gamma; E[-p y - euler_gamma | x] = x'theta
};
GumbelResponse gumbel_transform(double t, double p);

enum class EllipsoidKind { sub_gaussian, sub_exponential, heuristic, poisson_laplace, poisson_worst_case };

struct EllipsoidParams {
  EllipsoidKind kind = EllipsoidKind::sub_gaussian;
  double lambda = 1.0;
  double B = 1.0;
  double delta = 0.1;
  double subexp_k = 0.5;
  double subexp_nu = 0;  // 0 picks the model default
  SolverOptions solver{};
};

// Scale of the additive noise as the sub-exponential set sees it.
double default_subexp_scale(const ObservationModel& model);

// Maintains one of the ellipsoidal baselines over a bandit run.
class EllipsoidTracker {
 public:
  EllipsoidTracker(EllipsoidParams params, ObservationModel model, Index dim);

  void update(const Vector& x, double y);
  const EllipsoidSet& set() const { return set_; }
  double ucb(const Vector& x) const;

 private:
  void rebuild();
  // response on the linear-regression scale
  double regression_response(double y) const;
  bool uses_likelihood_center() const;

  EllipsoidParams p_;
  ObservationModel model_;
  Index dim_;
  Dataset data_;
  Matrix gram_;  // sum x x'
  Vector xr_;    // sum x r
  double noise_scale_ = 1.0;  // sigma or nu depending on the kind
  EllipsoidSet set_;
  Eigen::LLT<Matrix> llt_;
  std::optional<Vector> warm_;
};

}  // namespace lrcs
