#pragma once
// Independent reference implementations used only by tests. Nothing here
// calls into the library's likelihood code.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double normal_pdf(double y, double mean, double sd) {
  const double r = (y - mean) / sd;
  return std::exp(-0.5 * r * r) / (sd * std::sqrt(2 * M_PI));
}
inline double poisson_pmf(double k, double rate) {
  return std::exp(k * std::log(rate) - rate - std::lgamma(k + 1));
}
inline double bernoulli_pmf(double y, double z) {
  const double p = 1.0 / (1.0 + std::exp(-z));
  return y > 0.5 ? p : 1 - p;
}
inline double laplace_pdf(double y, double loc, double b) { return std::exp(-std::abs(y - loc) / b) / (2 * b); }
// rate exp(z), shape p
inline double weibull_pdf(double t, double z, double p) {
  const double rate = std::exp(z);
  return rate * p * std::pow(t, p - 1) * std::exp(-std::pow(t, p) * rate);
}

// composite Simpson on [a, b] with n (even) panels
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double central_second_difference(const std::function<double(double)>& f, double z, double h = 1e-4) {
  return (f(z + h) - 2 * f(z) + f(z - h)) / (h * h);
}

inline Eigen::VectorXd random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = n(rng);
  return v / v.norm();
}

inline Eigen::VectorXd random_in_ball(int d, double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  return random_unit(d, rng) * r * std::pow(u(rng), 1.0 / d);
}

// max over a 2D grid of x'theta among grid points passing `member`
inline double grid_max_2d(const Eigen::Vector2d& x, double radius, double step,
                          const std::function<bool(const Eigen::VectorXd&)>& member) {
  double best = -1e300;
  const int n = static_cast<int>(std::ceil(radius / step));
  Eigen::VectorXd th(2);
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      th << i * step, j * step;
      if (th.norm() > radius) continue;
      if (member(th)) best = std::max(best, x.dot(th));
    }
  return best;
}

}  // namespace oracle
