#include "lrcs/observation_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrcs {

double log_partition(const GlmSpec& m, double z) {
  switch (m.family) {
    case GlmFamily::gaussian:
      return z * z / (2.0 * m.sigma * m.sigma);
    case GlmFamily::poisson:
      return std::exp(z);
    case GlmFamily::bernoulli:
      return z > 30.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  return 0.0;
}

double log_partition_d1(const GlmSpec& m, double z) {
  switch (m.family) {
    case GlmFamily::gaussian:
      return z / (m.sigma * m.sigma);
    case GlmFamily::poisson:
      return std::exp(z);
    case GlmFamily::bernoulli:
      return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }
  return 0.0;
}

double log_partition_d2(const GlmSpec& m, double z) {
  switch (m.family) {
    case GlmFamily::gaussian:
      return 1.0 / (m.sigma * m.sigma);
    case GlmFamily::poisson:
      return std::exp(z);
    case GlmFamily::bernoulli: {
      const double s = log_partition_d1(m, z);
      return s * (1.0 - s);
    }
  }
  return 0.0;
}

// y/sigma^2 pairs with A(z) = z^2/(2 sigma^2); y/sigma would not normalize.
double sufficient_statistic(const GlmSpec& m, double y) {
  if (m.family == GlmFamily::gaussian) return y / (m.sigma * m.sigma);
  if (m.family == GlmFamily::poisson && !(y >= 0 && std::floor(y) == y))
    throw DomainError("poisson response must be a nonnegative integer, got " + std::to_string(y));
  if (m.family == GlmFamily::bernoulli && !(y == 0.0 || y == 1.0))
    throw DomainError("bernoulli response must be 0 or 1, got " + std::to_string(y));
  return y;
}

ObservationModel::ObservationModel(Spec spec) : spec_(spec) {
  if (const auto* g = std::get_if<GlmSpec>(&spec_)) {
    switch (g->family) {
      case GlmFamily::gaussian:
        if (!(g->sigma > 0)) throw std::invalid_argument("gaussian sigma must be positive");
        kind_ = Kind::gaussian;
        break;
      case GlmFamily::poisson:
        kind_ = Kind::poisson;
        break;
      case GlmFamily::bernoulli:
        kind_ = Kind::bernoulli;
        break;
    }
  } else if (const auto* l = std::get_if<LaplaceSpec>(&spec_)) {
    if (!(l->b > 0)) throw std::invalid_argument("laplace scale b must be positive");
    kind_ = Kind::laplace;
  } else {
    if (!(std::get<WeibullSurvivalSpec>(spec_).p >= 1.0))
      throw std::invalid_argument("weibull shape p must be >= 1");
    kind_ = Kind::weibull;
  }
}

std::string ObservationModel::name() const {
  switch (kind_) {
    case Kind::gaussian: return "gaussian";
    case Kind::poisson: return "poisson";
    case Kind::bernoulli: return "bernoulli";
    case Kind::laplace: return "laplace";
    case Kind::weibull: return "weibull";
  }
  return "";
}

const GlmSpec& ObservationModel::glm() const {
  if (const auto* g = std::get_if<GlmSpec>(&spec_)) return *g;
  throw UnsupportedModel(name() + " is not an exponential-family GLM");
}

bool ObservationModel::in_support(double y) const {
  if (!std::isfinite(y)) return false;
  switch (kind_) {
    case Kind::gaussian:
    case Kind::laplace:
      return true;
    case Kind::poisson:
      return y >= 0 && std::floor(y) == y;
    case Kind::bernoulli:
      return y == 0.0 || y == 1.0;
    case Kind::weibull:
      return y > 0;
  }
  return false;
}

void ObservationModel::check_support(double y) const {
  if (!in_support(y)) throw DomainError(name() + ": response " + std::to_string(y) + " outside support");
}

double ObservationModel::canonical_nll(double z, double y) const {
  check_support(y);
  switch (kind_) {
    case Kind::laplace:
      return std::abs(y - z) / std::get<LaplaceSpec>(spec_).b;
    case Kind::weibull:
      return std::pow(y, std::get<WeibullSurvivalSpec>(spec_).p) * std::exp(z) - z;
    default: {
      const auto& g = std::get<GlmSpec>(spec_);
      return log_partition(g, z) - sufficient_statistic(g, y) * z;
    }
  }
}

LossDerivatives ObservationModel::solver_loss(double z, double y, double smoothing) const {
  switch (kind_) {
    case Kind::laplace: {
      const double b = std::get<LaplaceSpec>(spec_).b;
      const double r = y - z;
      const double a = std::abs(r);
      const double eps = smoothing;
      if (a <= eps) return {r * r / (2 * eps * b), -r / (eps * b), 1.0 / (eps * b)};
      return {(a - 0.5 * eps) / b, (r > 0 ? -1.0 : 1.0) / b, 0.0};
    }
    case Kind::weibull: {
      const double s = std::pow(y, std::get<WeibullSurvivalSpec>(spec_).p) * std::exp(z);
      return {s - z, s - 1.0, s};
    }
    default: {
      const auto& g = std::get<GlmSpec>(spec_);
      return {log_partition(g, z) - sufficient_statistic(g, y) * z,
              log_partition_d1(g, z) - sufficient_statistic(g, y), log_partition_d2(g, z)};
    }
  }
}

double ObservationModel::log_base_measure(double y) const {
  check_support(y);
  switch (kind_) {
    case Kind::gaussian: {
      const double s = std::get<GlmSpec>(spec_).sigma;
      return -y * y / (2 * s * s) - 0.5 * std::log(2 * M_PI * s * s);
    }
    case Kind::poisson:
      return -std::lgamma(y + 1.0);
    case Kind::bernoulli:
      return 0.0;
    case Kind::laplace:
      return -std::log(2 * std::get<LaplaceSpec>(spec_).b);
    case Kind::weibull: {
      const double p = std::get<WeibullSurvivalSpec>(spec_).p;
      return std::log(p) + (p - 1) * std::log(y);
    }
  }
  return 0.0;
}

double ObservationModel::min_nll_on_interval(double y, double r) const {
  check_support(y);
  constexpr double inf = std::numeric_limits<double>::infinity();
  double z = 0;
  switch (kind_) {
    case Kind::gaussian:
    case Kind::laplace:
      z = y;
      break;
    case Kind::poisson:
      z = y > 0 ? std::log(y) : -inf;
      break;
    case Kind::bernoulli:
      z = y > 0 ? inf : -inf;
      break;
    case Kind::weibull:
      z = -std::get<WeibullSurvivalSpec>(spec_).p * std::log(y);
      break;
  }
  return canonical_nll(std::clamp(z, -r, r), y);
}

double ObservationModel::sample(double z, std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::gaussian:
      return z + std::normal_distribution<double>(0.0, std::get<GlmSpec>(spec_).sigma)(rng);
    case Kind::poisson:
      return static_cast<double>(std::poisson_distribution<long long>(std::exp(z))(rng));
    case Kind::bernoulli:
      return std::bernoulli_distribution(log_partition_d1(std::get<GlmSpec>(spec_), z))(rng) ? 1.0 : 0.0;
    case Kind::laplace: {
      const double b = std::get<LaplaceSpec>(spec_).b;
      const double u = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
      return z - b * (u < 0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
    }
    case Kind::weibull: {
      const double p = std::get<WeibullSurvivalSpec>(spec_).p;
      const double u = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);  // (0, 1]
      double t = std::pow(-std::log(u) / std::exp(z), 1.0 / p);
      // u == 1 gives t == 0 which is outside the support; nudge to the smallest positive double
      return t > 0 ? t : std::numeric_limits<double>::min();
    }
  }
  return 0.0;
}

double ObservationModel::mean_response(double z) const {
  switch (kind_) {
    case Kind::gaussian:
    case Kind::laplace:
      return z;
    case Kind::poisson:
      return std::exp(z);
    case Kind::bernoulli:
      return log_partition_d1(std::get<GlmSpec>(spec_), z);
    case Kind::weibull: {
      const double p = std::get<WeibullSurvivalSpec>(spec_).p;
      return std::tgamma(1.0 + 1.0 / p) * std::exp(-z / p);
    }
  }
  return 0.0;
}

CurvatureConstants ObservationModel::curvature(double radius) const {
  if (!(radius > 0)) throw std::invalid_argument("curvature radius must be positive");
  switch (kind_) {
    case Kind::gaussian: {
      const double s = std::get<GlmSpec>(spec_).sigma;
      return {1.0 / (s * s), 1.0 / (s * s)};
    }
    case Kind::poisson:
      return {std::exp(-radius), std::exp(radius)};
    case Kind::bernoulli: {
      const double e = std::exp(-radius);
      return {e / ((1.0 + e) * (1.0 + e)), 0.25};
    }
    case Kind::laplace: {
      const double b = std::get<LaplaceSpec>(spec_).b;
      return {1.0 / b, 1.0 / b};
    }
    case Kind::weibull:
      return {std::exp(-radius), std::exp(radius)};
  }
  return {1.0, 1.0};
}

}  // namespace lrcs
