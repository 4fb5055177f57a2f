#include "doctest.h"
#include "oracles.hpp"

#include "lrcs/observation_models.hpp"

#include <cmath>

using namespace lrcs;

namespace {

std::vector<ObservationModel> all_models() {
  return {ObservationModel::gaussian(0.7), ObservationModel::poisson(), ObservationModel::bernoulli(),
          ObservationModel::laplace(0.15), ObservationModel::weibull(2.0)};
}

// density from the independent oracle
double oracle_density(const ObservationModel& m, double z, double y) {
  switch (m.kind()) {
    case ObservationModel::Kind::gaussian: return oracle::normal_pdf(y, z, m.glm().sigma);
    case ObservationModel::Kind::poisson: return oracle::poisson_pmf(y, std::exp(z));
    case ObservationModel::Kind::bernoulli: return oracle::bernoulli_pmf(y, z);
    case ObservationModel::Kind::laplace: return oracle::laplace_pdf(y, z, std::get<LaplaceSpec>(m.spec()).b);
    case ObservationModel::Kind::weibull: return oracle::weibull_pdf(y, z, std::get<WeibullSurvivalSpec>(m.spec()).p);
  }
  return 0;
}

double total_mass(const ObservationModel& m, double z) {
  auto dens = [&](double y) { return std::exp(m.log_density(z, y)); };
  switch (m.kind()) {
    case ObservationModel::Kind::gaussian: {
      const double s = m.glm().sigma;
      return oracle::simpson(dens, z - 14 * s, z + 14 * s);
    }
    case ObservationModel::Kind::laplace: {
      const double b = std::get<LaplaceSpec>(m.spec()).b;
      return oracle::simpson(dens, z - 40 * b, z) + oracle::simpson(dens, z, z + 40 * b);
    }
    case ObservationModel::Kind::poisson: {
      double acc = 0;
      for (int k = 0; k < 400; ++k) acc += dens(k);
      return acc;
    }
    case ObservationModel::Kind::bernoulli:
      return dens(0) + dens(1);
    case ObservationModel::Kind::weibull: {
      const double p = std::get<WeibullSurvivalSpec>(m.spec()).p;
      const double tmax = std::pow(30.0 / std::exp(z), 1.0 / p);
      return oracle::simpson([&](double t) { return t > 0 ? dens(t) : 0.0; }, 0.0, tmax, 200000);
    }
  }
  return 0;
}

}  // namespace

TEST_SUITE("observation_models") {
  TEST_CASE("log partition values") {
    CHECK(log_partition({GlmFamily::gaussian, 1.0}, 2.0) == doctest::Approx(2.0));
    CHECK(log_partition({GlmFamily::poisson}, 0.0) == doctest::Approx(1.0));
    CHECK(log_partition({GlmFamily::bernoulli}, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // overflow-safe branch
    CHECK(log_partition({GlmFamily::bernoulli}, 800.0) == doctest::Approx(800.0));
    CHECK(std::isfinite(log_partition({GlmFamily::bernoulli}, 800.0)));
  }

  TEST_CASE("sufficient statistic conventions") {
    CHECK(sufficient_statistic({GlmFamily::gaussian, 2.0}, 4.0) == doctest::Approx(1.0));
    CHECK(sufficient_statistic({GlmFamily::poisson}, 3.0) == doctest::Approx(3.0));
    CHECK(sufficient_statistic({GlmFamily::bernoulli}, 0.0) == 0.0);
    CHECK_THROWS_AS(sufficient_statistic({GlmFamily::poisson}, -1.0), DomainError);
    CHECK_THROWS_AS(sufficient_statistic({GlmFamily::bernoulli}, 0.5), DomainError);
  }

  TEST_CASE("canonical nll values") {
    const auto g = ObservationModel::gaussian(1.0);
    CHECK(g.canonical_nll(0.0, 5.0) == doctest::Approx(0.0));
    CHECK(g.canonical_nll(1.0, 1.0) == doctest::Approx(-0.5));
    // equals log p_0(y) - log p_z(y) from the oracle density
    CHECK(g.canonical_nll(1.0, 1.0) ==
          doctest::Approx(std::log(oracle::normal_pdf(1, 0, 1)) - std::log(oracle::normal_pdf(1, 1, 1))));
    CHECK(ObservationModel::weibull(2.0).canonical_nll(0.0, 1.0) == doctest::Approx(1.0));
    CHECK(ObservationModel::laplace(0.5).canonical_nll(1.0, 2.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(ObservationModel::poisson().canonical_nll(0.0, 2.5), DomainError);
    CHECK_THROWS_AS(ObservationModel::weibull(2.0).canonical_nll(0.0, 0.0), DomainError);
  }

  TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS(ObservationModel::gaussian(0.0));
    CHECK_THROWS(ObservationModel::laplace(-1.0));
    CHECK_THROWS(ObservationModel::weibull(0.5));
    CHECK_THROWS_AS(ObservationModel::laplace(1.0).glm(), UnsupportedModel);
  }

  TEST_CASE("curvature constants") {
    auto c = ObservationModel::gaussian(0.15).curvature(4.0);
    CHECK(c.mu == doctest::Approx(44.444444).epsilon(1e-6));
    CHECK(c.L == doctest::Approx(44.444444).epsilon(1e-6));
    c = ObservationModel::poisson().curvature(1.0);
    CHECK(c.mu == doctest::Approx(0.3679).epsilon(1e-4));
    CHECK(c.L == doctest::Approx(2.7183).epsilon(1e-4));
    c = ObservationModel::bernoulli().curvature(50.0);
    CHECK(c.L == 0.25);
    CHECK(c.mu > 0);
    c = ObservationModel::laplace(0.15).curvature(4.0);
    CHECK(c.mu == doctest::Approx(1 / 0.15));
    c = ObservationModel::weibull(2.0).curvature(2.0);
    CHECK(c.mu == doctest::Approx(std::exp(-2.0)));
    CHECK(c.L == doctest::Approx(std::exp(2.0)));
  }

  TEST_CASE("log-partition second derivative lies within curvature bounds") {
    std::mt19937_64 rng(11);
    for (const auto& m : {ObservationModel::gaussian(0.3), ObservationModel::poisson(), ObservationModel::bernoulli()}) {
      for (double B : {0.5, 1.0, 3.0}) {
        const auto c = m.curvature(B);
        std::uniform_real_distribution<double> zd(-B, B);
        for (int i = 0; i < 200; ++i) {
          const double z = zd(rng);
          const double a2 = oracle::central_second_difference([&](double s) { return log_partition(m.glm(), s); }, z);
          const double tol = 1e-4 * c.L;
          CHECK(a2 >= c.mu - tol);
          CHECK(a2 <= c.L + tol);
        }
      }
    }
  }

  TEST_CASE("densities normalize") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> zd(-2, 2);
    for (const auto& m : all_models()) {
      for (int i = 0; i < 20; ++i) {
        const double z = zd(rng);
        CAPTURE(m.name());
        CAPTURE(z);
        CHECK(total_mass(m, z) == doctest::Approx(1.0).epsilon(1e-4));
      }
    }
  }

  TEST_CASE("nll differences equal exact log density ratios") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> zd(-2, 2);
    for (const auto& m : all_models()) {
      for (int i = 0; i < 50; ++i) {
        const double z1 = zd(rng), z2 = zd(rng);
        const double y = m.sample(zd(rng), rng);
        const double lhs = m.canonical_nll(z1, y) - m.canonical_nll(z2, y);
        const double rhs = std::log(oracle_density(m, z2, y)) - std::log(oracle_density(m, z1, y));
        CAPTURE(m.name());
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
      }
    }
  }

  TEST_CASE("sampler examples") {
    std::mt19937_64 rng(7);
    CHECK(ObservationModel::gaussian(1e-12).sample(1.0, rng) == doctest::Approx(1.0).epsilon(1e-6));

    const int n = 100000;
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += ObservationModel::poisson().sample(std::log(4.0), rng);
    CHECK(std::abs(acc / n - 4.0) <= 3 * std::sqrt(4.0 / n));

    const auto w = ObservationModel::weibull(2.0);
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double t = w.sample(0.0, rng);
      s += t;
      s2 += t * t;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - std::tgamma(1.5)) <= 3 * se);
  }

  TEST_CASE("sampler moments match every model") {
    std::mt19937_64 rng(8);
    const int n = 100000;
    for (const auto& m : all_models()) {
      for (double z : {-0.7, 0.0, 0.9}) {
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
          const double y = m.sample(z, rng);
          REQUIRE(m.in_support(y));
          s += y;
          s2 += y * y;
        }
        const double mean = s / n, se = std::sqrt(std::max(1e-300, s2 / n - mean * mean) / n);
        CAPTURE(m.name());
        CAPTURE(z);
        CHECK(std::abs(mean - m.mean_response(z)) <= 4 * se);
      }
    }
  }

  TEST_CASE("solver loss agrees with the exact nll away from the kink") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> zd(-2, 2);
    for (const auto& m : all_models()) {
      for (int i = 0; i < 50; ++i) {
        const double z = zd(rng);
        const double y = m.sample(zd(rng), rng);
        const auto l = m.solver_loss(z, y);
        CAPTURE(m.name());
        if (m.kind() == ObservationModel::Kind::laplace) {
          CHECK(l.value <= m.canonical_nll(z, y));
          CHECK(l.value >= m.canonical_nll(z, y) - ObservationModel::laplace_smoothing / (2 * 0.15) - 1e-12);
        } else {
          CHECK(l.value == doctest::Approx(m.canonical_nll(z, y)).epsilon(1e-12));
          const double h = 1e-6;
          const double fd = (m.canonical_nll(z + h, y) - m.canonical_nll(z - h, y)) / (2 * h);
          CHECK(l.d1 == doctest::Approx(fd).epsilon(1e-5));
          CHECK(l.curvature >= 0);
        }
      }
    }
  }

  TEST_CASE("interval minimum of the nll matches a dense scan") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> zd(-2, 2);
    for (const auto& m : all_models()) {
      for (int i = 0; i < 20; ++i) {
        const double y = m.sample(zd(rng), rng);
        const double r = 1.3;
        double best = 1e300;
        for (int k = 0; k <= 20000; ++k) best = std::min(best, m.canonical_nll(-r + 2 * r * k / 20000.0, y));
        const double got = m.min_nll_on_interval(y, r);
        CAPTURE(m.name());
        CHECK(got <= best + 1e-12);
        CHECK(got >= best - 1e-3);
      }
    }
  }
}
