#pragma once

#include "lrcs/common.hpp"

#include <random>
#include <string>
#include <variant>

namespace lrcs {

enum class GlmFamily { gaussian, poisson, bernoulli };

// Exponential family in natural parameter z = x'theta.
struct GlmSpec {
  GlmFamily family = GlmFamily::gaussian;
  double sigma = 1.0;  // only read for gaussian
};

// y = z + Laplace(b) noise.
struct LaplaceSpec {
  double b = 1.0;
};

// Weibull survival time with hazard scale exp(z) and known shape p.
struct WeibullSurvivalSpec {
  double p = 2.0;
};

struct CurvatureConstants {
  double mu;
  double L;
};

// value, first derivative in z, and a curvature usable as a Newton weight.
// For smooth models the curvature is the exact second derivative.
struct LossDerivatives {
  double value;
  double d1;
  double curvature;
};

double log_partition(const GlmSpec& m, double z);
double log_partition_d1(const GlmSpec& m, double z);
double log_partition_d2(const GlmSpec& m, double z);
double sufficient_statistic(const GlmSpec& m, double y);

class ObservationModel {
 public:
  using Spec = std::variant<GlmSpec, LaplaceSpec, WeibullSurvivalSpec>;
  enum class Kind { gaussian, poisson, bernoulli, laplace, weibull };

  // Final Huber half-width used by the solver for the Laplace loss, and the
  // schedule solvers walk down to reach it (each stage warm-starts the next).
  static constexpr double laplace_smoothing = 1e-6;
  static constexpr double laplace_continuation[] = {1e-2, 1e-4, 1e-6};

  explicit ObservationModel(Spec spec);

  static ObservationModel gaussian(double sigma) { return ObservationModel(GlmSpec{GlmFamily::gaussian, sigma}); }
  static ObservationModel poisson() { return ObservationModel(GlmSpec{GlmFamily::poisson, 1.0}); }
  static ObservationModel bernoulli() { return ObservationModel(GlmSpec{GlmFamily::bernoulli, 1.0}); }
  static ObservationModel laplace(double b) { return ObservationModel(LaplaceSpec{b}); }
  static ObservationModel weibull(double p) { return ObservationModel(WeibullSurvivalSpec{p}); }

  const Spec& spec() const { return spec_; }
  Kind kind() const { return kind_; }
  std::string name() const;

  bool is_glm() const { return std::holds_alternative<GlmSpec>(spec_); }
  const GlmSpec& glm() const;  // throws UnsupportedModel for non-GLMs

  bool in_support(double y) const;
  void check_support(double y) const;

  // Negative log-likelihood without the base measure. Exact, never smoothed.
  double canonical_nll(double z, double y) const;
  // What the optimizer sees. Equal to canonical_nll except for Laplace,
  // where it is the Huber function with the given half-width.
  LossDerivatives solver_loss(double z, double y, double smoothing = laplace_smoothing) const;
  // Models whose solver loss needs the smoothing schedule.
  bool needs_continuation() const { return kind_ == Kind::laplace; }
  // log h(y), only needed to assemble full densities for normalization checks.
  double log_base_measure(double y) const;
  double log_density(double z, double y) const { return log_base_measure(y) - canonical_nll(z, y); }

  // min of canonical_nll(z, y) over |z| <= r. Convex in z, so clamping the
  // stationary point is exact.
  double min_nll_on_interval(double y, double r) const;

  double sample(double z, std::mt19937_64& rng) const;
  double mean_response(double z) const;

  CurvatureConstants curvature(double radius) const;

 private:
  Spec spec_;
  Kind kind_;
};

}  // namespace lrcs
