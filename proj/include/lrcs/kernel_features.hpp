#pragma once

#include "lrcs/common.hpp"

#include <utility>
#include <vector>

namespace lrcs {

struct SquaredExponentialKernel {
  double lengthscale = 1.0;
  double operator()(const Vector& a, const Vector& b) const;
};

// Exact finite representation of the RKHS restricted to a grid.
struct FeatureMap {
  Matrix grid;  // n x input_dim
  Matrix phi;   // n x rank, rows are features
  SquaredExponentialKernel kernel;
  Index rank = 0;
  double tol = 1e-10;
  double jitter = 1e-10;
  double scale = 1.0;  // features were multiplied by this so the largest row norm is 1

  Vector feature(Index i) const { return phi.row(i).transpose(); }
};

// Uniform tensor grid, first coordinate varying slowest.
Matrix uniform_grid(const std::vector<std::pair<double, double>>& bounds, Index points_per_dim);

FeatureMap build_features(const Matrix& grid, const SquaredExponentialKernel& kernel, double tol = 1e-10,
                          double jitter = 1e-10);

enum class Benchmark { f4_1d, camelback };

// f4_1d(x) = -(1.4 - 3x) sin(18x) on [0, 1.2]. camelback takes inputs in
// [-1, 1]^2 mapped onto the box [-2, 2] x [-1, 1] and returns the negated
// six-hump camel function.
double benchmark_payoff(Benchmark b, const Vector& x);
double six_hump_camel(double u, double v);
std::vector<std::pair<double, double>> benchmark_domain(Benchmark b);

struct ProjectedPayoff {
  Vector theta;
  double norm = 0;
  double max_residual = 0;
};

// Ridge fit of grid payoff values in feature space. Throws if the fit misses
// any grid value by more than tol.
ProjectedPayoff project_payoff(const FeatureMap& fmap, const Vector& values, double lambda_fit = 1e-8,
                               double tol = 1e-4);

}  // namespace lrcs
