#include "lrcs/selftest.hpp"

#include "lrcs/baselines.hpp"
#include "lrcs/confidence_core.hpp"
#include "lrcs/kernel_features.hpp"
#include "lrcs/theory_oracles.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace lrcs {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Integral (or sum) of a density in y over the model's support.
double total_mass(const ObservationModel& m, double z, const std::function<double(double)>& dens) {
  switch (m.kind()) {
    case ObservationModel::Kind::gaussian: {
      const double s = m.glm().sigma;
      return simpson(dens, z - 14 * s, z + 14 * s, 4000);
    }
    case ObservationModel::Kind::laplace: {
      const double b = std::get<LaplaceSpec>(m.spec()).b;
      return simpson(dens, z - 40 * b, z, 8000) + simpson(dens, z, z + 40 * b, 8000);
    }
    case ObservationModel::Kind::poisson: {
      double acc = 0;
      for (int k = 0; k < 400; ++k) acc += dens(k);
      return acc;
    }
    case ObservationModel::Kind::bernoulli: return dens(0) + dens(1);
    case ObservationModel::Kind::weibull: {
      const double p = std::get<WeibullSurvivalSpec>(m.spec()).p;
      const double tmax = std::pow(30.0 / std::exp(z), 1.0 / p);
      return simpson([&](double t) { return t > 0 ? dens(t) : 0.0; }, 0.0, tmax, 100000);
    }
  }
  return 0;
}

std::vector<ObservationModel> models() {
  return {ObservationModel::gaussian(0.15), ObservationModel::poisson(), ObservationModel::bernoulli(),
          ObservationModel::laplace(0.15), ObservationModel::weibull(2.0)};
}

using Check = std::function<std::string()>;  // empty string = pass

std::string densities_normalize() {
  for (const ObservationModel& m : models())
    for (double z : {-1.0, 0.0, 0.7}) {
      const double mass = total_mass(m, z, [&](double y) { return std::exp(m.log_density(z, y)); });
      if (std::abs(mass - 1) > 1e-4) {
        std::ostringstream os;
        os << m.name() << " at z=" << z << " integrates to " << mass;
        return os.str();
      }
    }
  return {};
}

// h(y) exp(T(y) z - A(z)) must be a density and agree with the library's nll.
std::string exponential_family_assembly(SelftestFault fault) {
  for (const ObservationModel& m : {ObservationModel::gaussian(0.15), ObservationModel::gaussian(2.0),
                                    ObservationModel::poisson(), ObservationModel::bernoulli()}) {
    const GlmSpec& g = m.glm();
    auto T = [&](double y) {
      return fault == SelftestFault::wrong_sufficient_statistic ? y : sufficient_statistic(g, y);
    };
    for (double z : {-0.8, 0.3}) {
      auto dens = [&](double y) { return std::exp(m.log_base_measure(y) + T(y) * z - log_partition(g, z)); };
      const double mass = total_mass(m, z, dens);
      if (std::abs(mass - 1) > 1e-4) {
        std::ostringstream os;
        os << m.name() << " (sigma " << g.sigma << ") at z=" << z << " has mass " << mass;
        return os.str();
      }
    }
  }
  return {};
}

std::string curvature_bounds() {
  std::mt19937_64 rng(11);
  for (const ObservationModel& m : {ObservationModel::gaussian(0.3), ObservationModel::poisson(),
                                    ObservationModel::bernoulli()})
    for (double B : {0.5, 2.0}) {
      const CurvatureConstants c = m.curvature(B);
      std::uniform_real_distribution<double> zd(-B, B);
      for (int i = 0; i < 200; ++i) {
        const double z = zd(rng), h = 1e-4;
        const double a2 = (log_partition(m.glm(), z + h) - 2 * log_partition(m.glm(), z) +
                           log_partition(m.glm(), z - h)) / (h * h);
        if (a2 < c.mu - 1e-4 * c.L || a2 > c.L + 1e-4 * c.L) {
          std::ostringstream os;
          os << m.name() << ": A''(" << z << ") = " << a2 << " outside [" << c.mu << ", " << c.L << "]";
          return os.str();
        }
      }
    }
  return {};
}

std::string bound_arithmetic() {
  auto off = [](double got, double want) { return std::abs(got - want) > 1e-4 * std::max(1.0, std::abs(want)); };
  const std::vector<double> bias{1.0}, dg{std::log(2.0)};
  const double vaw = vaw_regret_bound(1, 1, 1, 1, std::log(2.0), std::exp(-1.0), bias, dg);
  if (off(vaw, 4.7329)) return "vaw_regret_bound example gives " + std::to_string(vaw);
  const double ftrl = ftrl_regret_bound(1, 1, 1, 1, 1, 0.1);
  if (off(ftrl, 8.6052)) return "ftrl_regret_bound example gives " + std::to_string(ftrl);
  const double radius = bregman_radius_bound(1, 1, 0.1, 0.1, 1, 1, 0, 0);
  if (off(radius, 17.8155)) return "bregman_radius_bound example gives " + std::to_string(radius);
  const double beta = linear_bandit_beta(1, 1, 1, 1, 0.1);
  if (off(beta, 64.841)) return "linear_bandit_beta example gives " + std::to_string(beta);
  const double sg = sub_gaussian_radius(Matrix::Identity(3, 3), 1, 1, 1, 0.1);
  if (off(sg, 3.1460)) return "sub_gaussian_radius example gives " + std::to_string(sg);
  return {};
}

std::string elliptical_potential() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 30; ++rep) {
    const Index d = 1 + rep % 8;
    const int t = 20 + 16 * rep;
    std::vector<Vector> us;
    for (int s = 0; s < t; ++s) {
      Vector v(d);
      for (Index i = 0; i < d; ++i) v[i] = n(rng);
      us.push_back(v / v.norm() * u(rng));
    }
    const PotentialCheck c = elliptical_potential_check(us, 1.0, d);
    if (!(c.lhs <= c.log_det_ratio + 1e-9 && c.log_det_ratio <= c.dimension_bound + 1e-9)) {
      std::ostringstream os;
      os << "d=" << d << " t=" << t << ": " << c.lhs << " / " << c.log_det_ratio << " / " << c.dimension_bound;
      return os.str();
    }
  }
  return {};
}

std::string feature_reconstruction() {
  for (Benchmark b : {Benchmark::f4_1d, Benchmark::camelback}) {
    const bool one_d = b == Benchmark::f4_1d;
    const FeatureMap f = build_features(uniform_grid(benchmark_domain(b), one_d ? 64 : 10),
                                        SquaredExponentialKernel{one_d ? 0.06 : 0.2});
    const double s2 = f.scale * f.scale;
    for (Index i = 0; i < f.grid.rows(); ++i)
      for (Index j = 0; j < f.grid.rows(); ++j) {
        const double k = f.kernel(f.grid.row(i).transpose(), f.grid.row(j).transpose());
        const double err = std::abs(f.phi.row(i).dot(f.phi.row(j)) / s2 - k);
        if (err > 1e-6) return (one_d ? "f4 grid" : "camelback grid") + std::string(" error ") + std::to_string(err);
      }
  }
  return {};
}

std::string ridge_equivalence() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0, 1);
  for (int rep = 0; rep < 10; ++rep) {
    const Index d = 2 + rep % 3;
    Dataset data(d);
    for (int s = 0; s < 30; ++s) {
      Vector x(d);
      for (Index i = 0; i < d; ++i) x[i] = n(rng);
      x /= std::max(1.0, x.norm());
      data.append(x, n(rng), 1.0);
    }
    const Vector closed = ridge_closed_form(data, 0.5, 1.0);
    const Estimate fit = ftrl_fit(ObservationModel::gaussian(0.5), data, Regularizer::ridge(1.0), 100.0);
    if ((fit.theta - closed).norm() > 1e-6) return "ftrl_fit differs from the ridge closed form by " +
                                                   std::to_string((fit.theta - closed).norm());
  }
  return {};
}

std::string weight_example() {
  LrConfig cfg;
  cfg.model = ObservationModel::gaussian(0.15);
  cfg.radius = 4;
  cfg.lambda = 1;
  const LrState s(cfg, 2);
  const double w = s.adaptive_weight(Vector::Unit(2, 0));
  if (std::abs(w - 7.03e-4) > 1e-6) return "first-round weight " + std::to_string(w) + ", expected 7.03e-4";
  return {};
}

}  // namespace

std::vector<PropertyResult> run_selftest(SelftestFault fault) {
  const std::vector<std::pair<std::string, Check>> checks{
      {"density normalization", densities_normalize},
      {"exponential-family assembly (T, A, h)", [fault] { return exponential_family_assembly(fault); }},
      {"log-partition curvature bounds", curvature_bounds},
      {"bound formula arithmetic", bound_arithmetic},
      {"elliptical potential", elliptical_potential},
      {"Nystrom feature reconstruction", feature_reconstruction},
      {"ftrl vs ridge closed form", ridge_equivalence},
      {"adaptive weight example", weight_example},
  };
  std::vector<PropertyResult> out;
  for (const auto& [name, check] : checks) {
    PropertyResult r{name, false, {}};
    try {
      r.detail = check();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("threw: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lrcs
