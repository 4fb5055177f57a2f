#include "lrcs/bandit_sim.hpp"

#include "lrcs/theory_oracles.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace lrcs {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// independent streams per (seed, purpose)
std::mt19937_64 stream(std::uint64_t seed, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose};
  return std::mt19937_64(seq);
}

Vector random_unit(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  do {
    for (Index i = 0; i < d; ++i) v[i] = n(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

// Something that picks actions and keeps a confidence set.
class Learner {
 public:
  virtual ~Learner() = default;
  // index of the most optimistic action, ties to the lowest index
  virtual Index choose(const std::vector<Vector>& actions, double* ucb, int* exact_solves) = 0;
  virtual void observe(const Vector& x, double y) = 0;
  virtual bool contains(const Vector& theta) const = 0;
  virtual double threshold() const = 0;
  virtual double last_weight() const = 0;
};

class LrLearner final : public Learner {
 public:
  LrLearner(const ObservationModel& model, Method method, const MethodSettings& s, Index dim, bool prune)
      : state_(make_config(model, method, s), dim), ucb_opt_(s.ucb), prune_(prune) {}

  Index choose(const std::vector<Vector>& actions, double* ucb, int* exact_solves) override {
    const Index n = static_cast<Index>(actions.size());
    if (static_cast<Index>(dual_.size()) != n) {
      dual_.assign(n, inf);
      eta_.assign(n, 0.0);
      warm_.assign(n, Vector());
      cap_.resize(n);
      for (Index a = 0; a < n; ++a) cap_[a] = state_.config().radius * actions[a].norm();
    }
    std::vector<double> ub(n);
    for (Index a = 0; a < n; ++a) ub[a] = std::min(cap_[a], dual_[a]);
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return ub[i] > ub[j]; });

    const UcbSolver solver(state_, ucb_opt_);
    double best = -inf;
    Index best_a = -1;
    int solves = 0;
    for (Index a : order) {
      auto loses = [&](double bound) { return bound < best || (bound == best && a > best_a); };
      if (prune_ && best_a >= 0) {
        if (loses(ub[a])) continue;
        if (eta_[a] > 0) {
          // one fresh dual evaluation is much cheaper than a full solve
          dual_[a] = solver.dual_bound(actions[a], eta_[a], &warm_[a]);
          if (loses(std::min(cap_[a], dual_[a]))) continue;
        }
      }
      const UcbResult r = solver.solve(actions[a], eta_[a] > 0 ? eta_[a] : 1.0);
      ++solves;
      eta_[a] = r.eta;
      warm_[a] = r.eta_theta;
      dual_[a] = r.eta > 0 ? r.dual_at_eta : cap_[a];
      if (r.value > best || (r.value == best && a < best_a)) {
        best = r.value;
        best_a = a;
      }
    }
    *ucb = best;
    *exact_solves = solves;
    return best_a;
  }

  void observe(const Vector& x, double y) override {
    state_.update(x, y);
    const Round& r = state_.rounds().back();
    // q(eta) grows by at most eta (est_nll - min of the new weighted loss over the ball)
    const double floor = r.w * state_.model().min_nll_on_interval(y, state_.config().radius * x.norm());
    const double shift = r.est_nll - floor;
    for (std::size_t a = 0; a < dual_.size(); ++a)
      if (eta_[a] > 0) dual_[a] += eta_[a] * shift;
  }

  bool contains(const Vector& theta) const override { return state_.contains(theta); }
  double threshold() const override { return state_.threshold().total(); }
  double last_weight() const override { return state_.rounds().empty() ? 1.0 : state_.rounds().back().w; }

 private:
  static LrConfig make_config(const ObservationModel& model, Method method, const MethodSettings& s) {
    LrConfig c;
    c.model = model;
    c.radius = s.B;
    c.lambda = s.lambda;
    c.alpha = s.alpha;
    c.weighting = method == Method::lr_classical ? Weighting::classical : Weighting::adaptive;
    c.estimator_uses_weights = s.estimator_uses_weights;
    c.vaw = s.vaw;
    c.solver = s.solver;
    return c;
  }

  LrState state_;
  UcbOptions ucb_opt_;
  bool prune_;
  std::vector<double> dual_, eta_, cap_;
  std::vector<Vector> warm_;  // inner maximizer at eta_, seeds the next fresh bound
};

EllipsoidKind ellipsoid_kind(Method m) {
  switch (m) {
    case Method::ay2011: return EllipsoidKind::sub_gaussian;
    case Method::subexp: return EllipsoidKind::sub_exponential;
    case Method::heuristic: return EllipsoidKind::heuristic;
    case Method::poisson_laplace: return EllipsoidKind::poisson_laplace;
    case Method::poisson_worstcase: return EllipsoidKind::poisson_worst_case;
    default: throw std::invalid_argument("not an ellipsoid method: " + method_name(m));
  }
}

class EllipsoidLearner final : public Learner {
 public:
  EllipsoidLearner(const ObservationModel& model, Method method, const MethodSettings& s, Index dim)
      : tracker_(params(method, s), model, dim) {}

  Index choose(const std::vector<Vector>& actions, double* ucb, int* exact_solves) override {
    double best = -inf;
    Index best_a = 0;
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const double v = tracker_.ucb(actions[a]);
      if (v > best) {
        best = v;
        best_a = static_cast<Index>(a);
      }
    }
    *ucb = best;
    *exact_solves = static_cast<int>(actions.size());
    return best_a;
  }
  void observe(const Vector& x, double y) override { tracker_.update(x, y); }
  bool contains(const Vector& theta) const override { return tracker_.set().contains(theta); }
  double threshold() const override { return tracker_.set().beta; }
  double last_weight() const override { return 1.0; }

 private:
  static EllipsoidParams params(Method method, const MethodSettings& s) {
    EllipsoidParams p;
    p.kind = ellipsoid_kind(method);
    p.lambda = s.lambda;
    p.B = s.B;
    p.delta = s.delta;
    p.subexp_k = s.subexp_k;
    p.subexp_nu = s.subexp_nu;
    p.solver = s.solver;
    return p;
  }

  EllipsoidTracker tracker_;
};

std::unique_ptr<Learner> make_learner(const ObservationModel& model, Method method, const MethodSettings& s,
                                      Index dim, bool prune) {
  if (is_lr(method)) return std::make_unique<LrLearner>(model, method, s, dim, prune);
  return std::make_unique<EllipsoidLearner>(model, method, s, dim);
}

// log det(sum mu x x'/lambda + I), updated one covariate at a time
class GainTracker {
 public:
  GainTracker(Index d, double mu, double lambda) : mu_(mu), inv_(Matrix::Identity(d, d) / lambda) {}
  double add(const Vector& x) {
    const Vector vx = inv_ * x;
    const double q = x.dot(vx);
    gamma_ += std::log1p(mu_ * q);
    inv_ -= (mu_ / (1 + mu_ * q)) * vx * vx.transpose();
    return gamma_;
  }

 private:
  double mu_;
  Matrix inv_;
  double gamma_ = 0;
};

}  // namespace

BanditEnvironment make_environment(std::vector<Vector> actions, Vector theta_star, ObservationModel model) {
  if (actions.empty()) throw std::invalid_argument("environment needs at least one action");
  BanditEnvironment env;
  env.model = std::move(model);
  env.theta_star = std::move(theta_star);
  for (const Vector& a : actions) {
    require_dim(a.size(), env.theta_star.size(), "action");
    if (a.norm() > 1 + 1e-12) throw std::invalid_argument("actions must have norm at most 1");
  }
  env.actions = std::move(actions);
  env.optimal_value = -inf;
  for (std::size_t a = 0; a < env.actions.size(); ++a) {
    const double v = env.actions[a].dot(env.theta_star);
    if (v > env.optimal_value) {
      env.optimal_value = v;
      env.optimal_action = static_cast<Index>(a);
    }
  }
  return env;
}

BanditEnvironment kernel_environment(const KernelEnvSpec& spec, ObservationModel model) {
  const Matrix grid = uniform_grid(benchmark_domain(spec.benchmark), spec.grid_size);
  const FeatureMap fmap = build_features(grid, SquaredExponentialKernel{spec.lengthscale});
  Vector values(grid.rows());
  for (Index i = 0; i < grid.rows(); ++i) values[i] = benchmark_payoff(spec.benchmark, grid.row(i).transpose());
  ProjectedPayoff p = project_payoff(fmap, values);
  double scale = 1.0;
  if (p.norm > spec.B) {
    // shrink the payoff so theta* sits inside the ball, with a little room
    scale = 0.99 * spec.B / p.norm;
    p.theta *= scale;
    p.norm *= scale;
  }
  std::vector<Vector> actions;
  for (Index i = 0; i < grid.rows(); ++i) actions.push_back(fmap.feature(i));
  BanditEnvironment env = make_environment(std::move(actions), p.theta, std::move(model));
  env.payoff_scale = scale;
  env.feature_scale = fmap.scale;
  env.description = std::string(spec.benchmark == Benchmark::f4_1d ? "f4_1d" : "camelback") +
                    " rank=" + std::to_string(fmap.rank) + " theta_norm=" + std::to_string(p.norm) +
                    " payoff_scale=" + std::to_string(scale) + " feature_scale=" + std::to_string(fmap.scale);
  return env;
}

BanditEnvironment random_linear_environment(const LinearEnvSpec& spec, ObservationModel model) {
  auto rng = stream(spec.seed, 7);
  std::vector<Vector> actions;
  for (Index a = 0; a < spec.n_actions; ++a) actions.push_back(random_unit(spec.dim, rng));
  Vector theta = spec.theta_norm * random_unit(spec.dim, rng);
  BanditEnvironment env = make_environment(std::move(actions), std::move(theta), std::move(model));
  env.description = "random_linear dim=" + std::to_string(spec.dim) + " actions=" + std::to_string(spec.n_actions);
  return env;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::lr_weighted: return "lr_weighted";
    case Method::lr_classical: return "lr_classical";
    case Method::ay2011: return "ay2011";
    case Method::subexp: return "subexp";
    case Method::heuristic: return "heuristic";
    case Method::poisson_laplace: return "poisson_laplace";
    case Method::poisson_worstcase: return "poisson_worstcase";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::lr_weighted, Method::lr_classical, Method::ay2011, Method::subexp, Method::heuristic,
                   Method::poisson_laplace, Method::poisson_worstcase})
    if (method_name(m) == name) return m;
  return std::nullopt;
}

bool is_lr(Method m) { return m == Method::lr_weighted || m == Method::lr_classical; }

RunResult run_ucb(const BanditEnvironment& env, Method method, const MethodSettings& settings,
                  const RunOptions& opt, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  RunResult out;
  out.seed = seed;
  out.method = method;
  if (opt.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  auto rng = stream(seed, 0);
  const ObservationModel& model = env.model;
  const Index d = env.dim();

  const CurvatureConstants curv = model.curvature(settings.B);
  GainTracker gain(d, curv.mu, settings.lambda);
  const bool gaussian = model.kind() == ObservationModel::Kind::gaussian;

  try {
    auto learner = make_learner(model, method, settings, d, opt.prune);
    bool covered = true;
    double cum = 0;
    for (int t = 0; t < opt.horizon; ++t) {
      const auto t0 = clock::now();
      RoundRecord rec;
      const Index a = learner->choose(env.actions, &rec.ucb, &rec.exact_solves);
      const Vector& x = env.actions[a];
      const double z = x.dot(env.theta_star);
      const double y = model.sample(z, rng);
      learner->observe(x, y);

      covered = covered && learner->contains(env.theta_star);
      rec.action = a;
      rec.reward = y;
      rec.regret = env.optimal_value - z;
      cum += rec.regret;
      rec.cum_regret = cum;
      rec.threshold = learner->threshold();
      rec.weight = learner->last_weight();
      rec.covered = covered;
      if (opt.report_bounds && is_lr(method)) {
        const double g = gain.add(x);
        rec.bound_t4 = ftrl_regret_bound(settings.lambda, settings.B, curv.L, curv.mu, g, settings.delta);
        if (gaussian)
          rec.bound_t6 = linear_bandit_regret_bound(t + 1, g, model.glm().sigma, settings.lambda, settings.B,
                                                    settings.delta);
      }
      rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      out.rounds.push_back(rec);
      if (opt.round_time_budget > 0 && rec.seconds > opt.round_time_budget) {
        out.failed = true;
        out.error = "round " + std::to_string(t + 1) + " took " + std::to_string(rec.seconds) +
                    " s, over the budget of " + std::to_string(opt.round_time_budget) + " s";
        break;
      }
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = "round " + std::to_string(out.rounds.size() + 1) + ": " + e.what();
  }
  return out;
}

std::string scenario_name(const CalibrationScenario& s) {
  return std::string(s.covariates == Covariates::adaptive ? "adaptive" : "iid") + "_theta_" +
         (s.theta == ThetaKind::zero ? "zero" : "random");
}

CalibrationResult run_calibration(const CalibrationScenario& scenario, const ObservationModel& model, Method method,
                                  const MethodSettings& settings, int horizon, int runs, std::uint64_t base_seed) {
  if (runs <= 0) throw std::invalid_argument("calibration needs at least one run");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  CalibrationResult res;
  res.runs = runs;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(r);
    auto env_rng = stream(seed, 1);
    const Vector theta = scenario.theta == ThetaKind::zero
                             ? Vector::Zero(scenario.dim)
                             : Vector(scenario.theta_norm * random_unit(scenario.dim, env_rng));
    bool covered = true;
    if (scenario.covariates == Covariates::adaptive) {
      std::vector<Vector> actions;
      for (Index a = 0; a < scenario.n_actions; ++a) actions.push_back(random_unit(scenario.dim, env_rng));
      const BanditEnvironment env = make_environment(std::move(actions), theta, model);
      RunOptions opt;
      opt.horizon = horizon;
      const RunResult run = run_ucb(env, method, settings, opt, seed);
      if (run.failed) {
        ++res.failed;
        continue;
      }
      covered = run.rounds.back().covered;
    } else {
      auto rng = stream(seed, 0);
      try {
        auto learner = make_learner(model, method, settings, scenario.dim, false);
        for (int t = 0; t < horizon; ++t) {
          const Vector x = random_unit(scenario.dim, env_rng);
          learner->observe(x, model.sample(x.dot(theta), rng));
          covered = covered && learner->contains(theta);
        }
      } catch (const std::exception&) {
        ++res.failed;
        continue;
      }
    }
    res.covered += covered;
  }
  return res;
}

std::vector<RunResult> sweep(const BanditEnvironment& env, const std::vector<Method>& methods,
                             const MethodSettings& settings, const RunOptions& opt, std::uint64_t base_seed,
                             int n_seeds, int jobs) {
  std::vector<SweepJob> todo;
  for (Method m : methods)
    for (int i = 0; i < n_seeds; ++i) todo.push_back({m, base_seed + static_cast<std::uint64_t>(i)});
  std::vector<RunResult> results(todo.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < todo.size(); k = next++) {
      try {
        results[k] = run_ucb(env, todo[k].method, settings, opt, todo[k].seed);
      } catch (const std::exception& e) {
        results[k].seed = todo[k].seed;
        results[k].method = todo[k].method;
        results[k].failed = true;
        results[k].error = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(todo.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

std::vector<double> median_cumulative_regret(const std::vector<RunResult>& runs, Method method) {
  std::vector<double> med;
  for (std::size_t t = 0;; ++t) {
    std::vector<double> v;
    for (const RunResult& r : runs)
      if (r.method == method && t < r.rounds.size()) v.push_back(r.rounds[t].cum_regret);
    if (v.empty()) break;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    med.push_back(n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
  }
  return med;
}

}  // namespace lrcs
