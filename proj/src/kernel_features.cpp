#include "lrcs/kernel_features.hpp"

#include <cmath>

namespace lrcs {

double SquaredExponentialKernel::operator()(const Vector& a, const Vector& b) const {
  return std::exp(-(a - b).squaredNorm() / (2.0 * lengthscale * lengthscale));
}

Matrix uniform_grid(const std::vector<std::pair<double, double>>& bounds, Index points_per_dim) {
  if (bounds.empty() || points_per_dim < 1) throw std::invalid_argument("uniform_grid: empty grid");
  const Index dim = static_cast<Index>(bounds.size());
  Index n = 1;
  for (Index i = 0; i < dim; ++i) n *= points_per_dim;
  Matrix g(n, dim);
  for (Index row = 0; row < n; ++row) {
    Index rem = row;
    for (Index j = dim - 1; j >= 0; --j) {
      const Index k = rem % points_per_dim;
      rem /= points_per_dim;
      const auto [lo, hi] = bounds[j];
      g(row, j) = points_per_dim == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (points_per_dim - 1);
    }
  }
  return g;
}

FeatureMap build_features(const Matrix& grid, const SquaredExponentialKernel& kernel, double tol,
                          double jitter) {
  const Index n = grid.rows();
  if (n == 0) throw std::invalid_argument("build_features: empty grid");
  if (!(kernel.lengthscale > 0)) throw std::invalid_argument("build_features: lengthscale must be positive");
  Matrix K(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j <= i; ++j) K(i, j) = K(j, i) = kernel(grid.row(i).transpose(), grid.row(j).transpose());
  K.diagonal().array() += jitter;

  Eigen::SelfAdjointEigenSolver<Matrix> es(K);
  const Vector& ev = es.eigenvalues();  // ascending
  if (ev[0] < -1e-8) throw std::runtime_error("build_features: kernel matrix is not PSD");

  FeatureMap f;
  f.grid = grid;
  f.kernel = kernel;
  f.tol = tol;
  f.jitter = jitter;
  Index m = 0;
  for (Index i = 0; i < n; ++i)
    if (ev[i] >= tol) ++m;
  f.rank = m;
  f.phi.resize(n, m);
  for (Index c = 0; c < m; ++c) {
    const Index src = n - 1 - c;  // largest eigenvalue first
    Vector u = es.eigenvectors().col(src);
    const double amax = u.cwiseAbs().maxCoeff();
    for (Index i = 0; i < n; ++i) {
      if (std::abs(u[i]) > 1e-12 * amax) {
        if (u[i] < 0) u = -u;
        break;
      }
    }
    f.phi.col(c) = std::sqrt(ev[src]) * u;
  }
  const double maxnorm = f.phi.rowwise().norm().maxCoeff();
  f.scale = maxnorm > 0 ? 1.0 / maxnorm : 1.0;
  f.phi *= f.scale;
  return f;
}

double six_hump_camel(double u, double v) {
  const double u2 = u * u;
  return 4 * u2 - 2.1 * u2 * u2 + u2 * u2 * u2 / 3.0 + u * v - 4 * v * v + 4 * v * v * v * v;
}

std::vector<std::pair<double, double>> benchmark_domain(Benchmark b) {
  if (b == Benchmark::f4_1d) return {{0.0, 1.2}};
  return {{-1.0, 1.0}, {-1.0, 1.0}};
}

double benchmark_payoff(Benchmark b, const Vector& x) {
  const auto dom = benchmark_domain(b);
  require_dim(x.size(), static_cast<Index>(dom.size()), "benchmark_payoff");
  for (Index i = 0; i < x.size(); ++i) {
    const double slack = 1e-12 * (dom[i].second - dom[i].first);
    if (!(x[i] >= dom[i].first - slack && x[i] <= dom[i].second + slack))
      throw DomainError("benchmark_payoff: input outside the benchmark domain");
  }
  if (b == Benchmark::f4_1d) return -(1.4 - 3.0 * x[0]) * std::sin(18.0 * x[0]);
  return -six_hump_camel(2.0 * x[0], x[1]);
}

ProjectedPayoff project_payoff(const FeatureMap& fmap, const Vector& values, double lambda_fit, double tol) {
  require_dim(values.size(), fmap.phi.rows(), "project_payoff");
  const Matrix& P = fmap.phi;
  Matrix A = P.transpose() * P;
  A.diagonal().array() += lambda_fit;
  ProjectedPayoff out;
  out.theta = A.llt().solve(P.transpose() * values);
  out.norm = out.theta.norm();
  out.max_residual = (P * out.theta - values).cwiseAbs().maxCoeff();
  if (!(out.max_residual <= tol))
    throw std::runtime_error("project_payoff: residual " + std::to_string(out.max_residual) +
                             " exceeds tolerance; payoff not representable at this rank");
  return out;
}

}  // namespace lrcs
