#include "doctest.h"
#include "oracles.hpp"

#include "lrcs/confidence_core.hpp"
#include "lrcs/theory_oracles.hpp"

#include <cmath>
#include <limits>

using namespace lrcs;

namespace {

Vector e(Index d, Index i) {
  Vector v = Vector::Zero(d);
  v[i] = 1;
  return v;
}

std::vector<double> weights_of(const LrState& s) {
  std::vector<double> w;
  for (const Round& r : s.rounds()) w.push_back(r.w);
  return w;
}

std::vector<Vector> covariates_of(const LrState& s) {
  std::vector<Vector> xs;
  for (const Round& r : s.rounds()) xs.push_back(r.x);
  return xs;
}

}  // namespace

TEST_SUITE("theory_oracles") {
  TEST_CASE("information gain examples") {
    const GainLedger one = information_gain({e(2, 0)}, 1.0, 1.0, 2);
    CHECK(one.gamma == doctest::Approx(std::log(2.0)));
    CHECK(information_gain({}, 1.0, 1.0, 3).gamma == 0.0);
  }

  TEST_CASE("information gain ledger and dimension bound") {
    std::mt19937_64 rng(1);
    for (int inst = 0; inst < 30; ++inst) {
      const int d = 1 + inst % 5, t = 1 + 7 * inst;
      const double mu = 0.1 + 0.2 * (inst % 7), lambda = 0.5 + 0.3 * (inst % 4);
      std::vector<Vector> xs;
      for (int k = 0; k < t; ++k) xs.push_back(oracle::random_in_ball(d, 1.0, rng));
      const GainLedger g = information_gain(xs, mu, lambda, d);
      double sum = 0;
      for (double inc : g.increments) {
        CHECK(inc >= 0);
        sum += inc;
      }
      CHECK(g.gamma >= 0);
      CHECK(std::abs(sum - g.gamma) <= 1e-8);
      CHECK(g.gamma <= d * std::log(mu * t / lambda + 1) + 1e-12);
      // direct log det
      Matrix M = Matrix::Identity(d, d);
      for (const Vector& x : xs) M += mu / lambda * x * x.transpose();
      CHECK(g.gamma == doctest::Approx(std::log(M.determinant())).epsilon(1e-9));
    }
  }

  TEST_CASE("bregman divergence properties") {
    std::mt19937_64 rng(2);
    const std::vector<ObservationModel> models{ObservationModel::gaussian(0.7), ObservationModel::poisson(),
                                               ObservationModel::bernoulli()};
    for (const auto& m : models) {
      for (int inst = 0; inst < 1000 / 3 + 1; ++inst) {
        const int d = 1 + inst % 4;
        std::vector<Vector> xs;
        std::vector<double> ws;
        for (int k = 0; k < 6; ++k) {
          xs.push_back(oracle::random_in_ball(d, 1.0, rng));
          ws.push_back(0.1 + 0.15 * k);
        }
        const Vector a = oracle::random_in_ball(d, 2.0, rng), b = oracle::random_in_ball(d, 2.0, rng);
        CHECK(bregman_divergence(m, xs, ws, 0.5, a, a) == 0.0);
        CHECK(bregman_divergence(m, xs, ws, 0.5, a, b) >= -1e-12);
      }
    }
    CHECK_THROWS_AS(bregman_divergence(ObservationModel::laplace(1), {e(1, 0)}, std::vector<double>{1.0}, 1.0,
                                       e(1, 0), Vector::Zero(1)),
                    UnsupportedModel);
  }

  TEST_CASE("gaussian bregman divergence is the quadratic form") {
    std::mt19937_64 rng(3);
    const double sigma = 0.6, nu = 0.8;
    for (int inst = 0; inst < 20; ++inst) {
      const int d = 1 + inst % 4;
      std::vector<Vector> xs;
      std::vector<double> ws;
      Matrix V = nu * Matrix::Identity(d, d);
      for (int k = 0; k < 10; ++k) {
        xs.push_back(oracle::random_in_ball(d, 1.0, rng));
        ws.push_back(1.0);
        V += xs.back() * xs.back().transpose() / (sigma * sigma);
      }
      const Vector a = oracle::random_in_ball(d, 1.0, rng), b = oracle::random_in_ball(d, 1.0, rng);
      const double direct = 0.5 * (a - b).dot(V * (a - b));
      CHECK(std::abs(bregman_divergence(ObservationModel::gaussian(sigma), xs, ws, nu, a, b) - direct) <= 1e-10);
    }
  }

  TEST_CASE("log partition gradient matches central differences") {
    std::mt19937_64 rng(4);
    for (const auto& m : {ObservationModel::gaussian(0.4), ObservationModel::poisson(), ObservationModel::bernoulli()}) {
      std::vector<Vector> xs;
      std::vector<double> ws;
      for (int k = 0; k < 8; ++k) {
        xs.push_back(oracle::random_in_ball(3, 1.0, rng));
        ws.push_back(0.3 + 0.05 * k);
      }
      const Vector th = oracle::random_in_ball(3, 1.5, rng);
      Vector grad;
      log_partition_sum(m, xs, ws, 0.7, th, &grad);
      for (Index i = 0; i < 3; ++i) {
        Vector a = th, b = th;
        a[i] += 1e-5;
        b[i] -= 1e-5;
        const double fd = (log_partition_sum(m, xs, ws, 0.7, a) - log_partition_sum(m, xs, ws, 0.7, b)) / 2e-5;
        CHECK(std::abs(fd - grad[i]) <= 1e-6 * std::max(1.0, std::abs(grad[i])));
      }
    }
  }

  TEST_CASE("bregman information gain") {
    std::vector<double> ws{1.0};
    const double g = bregman_information_gain(ObservationModel::gaussian(1.0), {e(2, 0)}, ws, 1.0, 2);
    CHECK(g == doctest::Approx(std::log(2.0)));
    // unit weights recover the classical gain with mu = 1/sigma^2
    std::mt19937_64 rng(5);
    std::vector<Vector> xs;
    std::vector<double> unit;
    for (int k = 0; k < 12; ++k) {
      xs.push_back(oracle::random_in_ball(3, 1.0, rng));
      unit.push_back(1.0);
    }
    CHECK(bregman_information_gain(ObservationModel::gaussian(0.5), xs, unit, 0.9, 3) ==
          doctest::Approx(information_gain(xs, 4.0, 0.9, 3).gamma).epsilon(1e-10));
    CHECK_THROWS_AS(bregman_information_gain(ObservationModel::poisson(), xs, unit, 1.0, 3), UnsupportedModel);
  }

  TEST_CASE("radius bound arithmetic") {
    CHECK(bregman_radius_bound(1, 1, 0.1, 0.1, 1, 1, 0, 0) == doctest::Approx(17.8155).epsilon(1e-5));
    const double a = bregman_radius_bound(2, 0.5, 0.05, 0.2, 0.7, 1.3, 0.4, 1.0);
    const double b = bregman_radius_bound(2, 0.5, 0.05, 0.2, 0.7, 1.3, 0.4, 3.5);
    CHECK(b - a == doctest::Approx(2 * 2.5));
  }

  TEST_CASE("regret bound arithmetic") {
    CHECK(ftrl_regret_bound(1, 1, 1, 1, 1, 0.1) == doctest::Approx(8.6052).epsilon(1e-5));
    CHECK(ftrl_regret_bound(0.3, 2, 3, 1.5, 0, 0.05) == doctest::Approx(0.3 * 4 + 2 * 2 * std::log(20.0)));

    const std::vector<double> bias{1.0}, dg{std::log(2.0)};
    CHECK(vaw_regret_bound(1, 1, 1, 1, std::log(2.0), std::exp(-1.0), bias, dg) == doctest::Approx(4.7329).epsilon(1e-5));
    const std::vector<double> none;
    CHECK(vaw_regret_bound(0.5, 2, 3, 1.5, 0, 0.1, none, none) == doctest::Approx(0.5 * 4 + 4 * std::log(10.0)));
    const std::vector<double> inf{std::numeric_limits<double>::infinity()};
    CHECK(vaw_regret_bound(1, 1, 1, 1, std::log(2.0), std::exp(-1.0), inf, dg) ==
          doctest::Approx(1 + 2 * (std::log(2.0) + 1)));
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(vaw_regret_bound(1, 1, 1, 1, 1, 0.1, two, dg), DimensionError);

    CHECK(linear_bandit_beta(0, 1, 1, 0, 1.0) == 0.0);
    CHECK(linear_bandit_beta(1, 1, 1, 1, 0.1) == doctest::Approx(64.841).epsilon(1e-5));
    const double t = 50, g = 2, s = 0.5, l = 4, B = 1, d = 0.1;
    CHECK(linear_bandit_regret_bound(t, g, s, l, B, d) ==
          doctest::Approx(6 * std::sqrt(t * g) * (s * std::sqrt(std::log(1 / d) + g) + s * std::sqrt(l) * B + B * std::sqrt(g))));
  }

  TEST_CASE("elliptical potential") {
    const PotentialCheck two = elliptical_potential_check({e(2, 0), e(2, 0)}, 1.0, 2);
    CHECK(two.lhs == doctest::Approx(1.0 / 2 + 1.0 / 3));
    CHECK(two.log_det_ratio == doctest::Approx(std::log(3.0)));
    const PotentialCheck empty = elliptical_potential_check({}, 1.0, 2);
    CHECK(empty.lhs == 0.0);
    CHECK(empty.log_det_ratio == 0.0);

    std::mt19937_64 rng(6);
    std::vector<Vector> us;
    for (int k = 0; k < 500; ++k) us.push_back(oracle::random_unit(5, rng));
    const PotentialCheck big = elliptical_potential_check(us, 1.0, 5);
    CHECK(big.lhs <= big.log_det_ratio);
    CHECK(big.log_det_ratio <= big.dimension_bound);
  }

  TEST_CASE("members of the LR set lie inside the bregman radius") {
    const double sigma = 0.5, lambda = 1.0, B = 1.0, alpha = 0.1, delta = 0.1;
    const int seeds = 20;
    int failures = 0;
    for (int seed = 0; seed < seeds; ++seed) {
      std::mt19937_64 rng(300 + seed);
      LrConfig c;
      c.model = ObservationModel::gaussian(sigma);
      c.lambda = lambda;
      c.radius = B;
      c.alpha = alpha;
      LrState s(c, 2);
      const Vector theta_star = oracle::random_in_ball(2, B, rng);
      for (int t = 0; t < 30; ++t) {
        const Vector x = oracle::random_unit(2, rng);
        s.update(x, c.model.sample(x.dot(theta_star), rng));
      }
      const auto xs = covariates_of(s);
      const auto ws = weights_of(s);
      const double L = s.curvature().L, mu = s.curvature().mu;
      const double gamma = bregman_information_gain(c.model, xs, ws, lambda, 2);
      const double regret = -s.log_ratio(theta_star);
      const double rhs = bregman_radius_bound(L, mu, alpha, delta, lambda, B, gamma, regret);
      bool ok = true;
      Vector th(2);
      for (double a = -B; a <= B; a += 0.02)
        for (double b = -B; b <= B; b += 0.02) {
          th << a, b;
          if (th.norm() > B || !s.contains(th)) continue;
          if (bregman_divergence(c.model, xs, ws, lambda, th, theta_star) > rhs) ok = false;
        }
      failures += !ok;
    }
    CHECK(failures <= delta * seeds + 3 * std::sqrt(seeds * delta * (1 - delta)));
  }

  TEST_CASE("realized FTRL regret stays under the bound") {
    const double sigma = 0.5, lambda = 1.0, B = 1.0, delta = 0.1;
    const int seeds = 20, T = 200;
    int good = 0;
    for (int seed = 0; seed < seeds; ++seed) {
      std::mt19937_64 rng(400 + seed);
      LrConfig c;
      c.model = ObservationModel::gaussian(sigma);
      c.lambda = lambda;
      c.radius = B;
      c.weighting = Weighting::classical;
      LrState s(c, 2);
      const Vector theta_star = oracle::random_in_ball(2, B, rng);
      const double mu = 1 / (sigma * sigma), L = mu;
      std::vector<Vector> xs;
      bool ok = true;
      for (int t = 0; t < T; ++t) {
        const Vector x = oracle::random_unit(2, rng);
        xs.push_back(x);
        s.update(x, c.model.sample(x.dot(theta_star), rng));
        const double gamma = information_gain(xs, mu, lambda, 2).gamma;
        if (-s.log_ratio(theta_star) > ftrl_regret_bound(lambda, B, L, mu, gamma, delta)) ok = false;
      }
      good += ok;
    }
    CHECK(good >= (1 - delta) * seeds - 3 * std::sqrt(seeds * delta * (1 - delta)));
  }

  TEST_CASE("realized VAW regret stays under the bound") {
    const double sigma = 0.5, lambda = 1.0, B = 1.0, delta = 0.1;
    const int seeds = 20, T = 100;
    int good = 0;
    for (int seed = 0; seed < seeds; ++seed) {
      std::mt19937_64 rng(500 + seed);
      LrConfig c;
      c.model = ObservationModel::gaussian(sigma);
      c.lambda = lambda;
      c.radius = B;
      c.vaw = true;
      LrState s(c, 2);
      const Vector theta_star = oracle::random_in_ball(2, B, rng);
      const double mu = 1 / (sigma * sigma), L = mu;
      std::vector<Vector> xs;
      std::vector<double> bias, dgamma;
      bool ok = true;
      for (int t = 0; t < T; ++t) {
        const Vector x = oracle::random_unit(2, rng);
        bias.push_back(s.bias_bound(x));
        xs.push_back(x);
        s.update(x, c.model.sample(x.dot(theta_star), rng));
        const GainLedger g = information_gain(xs, mu, lambda, 2);
        dgamma.push_back(g.increments.back());
        if (-s.log_ratio(theta_star) > vaw_regret_bound(lambda, B, L, mu, g.gamma, delta, bias, dgamma)) ok = false;
      }
      good += ok;
    }
    CHECK(good >= (1 - delta) * seeds - 3 * std::sqrt(seeds * delta * (1 - delta)));
  }
}
