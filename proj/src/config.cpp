#include "lrcs/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace lrcs {

using json = nlohmann::json;

namespace {

// One JSON object. Every key read is recorded so leftovers can be reported.
class Table {
 public:
  Table(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label() + " must be a table (JSON object)");
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
      out = v->get<double>();
    }
  }
  void read(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + " must be an integer");
      out = v->get<int>();
    }
  }
  void read(const std::string& key, Index& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + " must be an integer");
      out = v->get<Index>();
    }
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(where(key) + " must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + " must be true or false");
      out = v->get<bool>();
    }
  }
  void read(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + " must be a string");
      out = v->get<std::string>();
    }
  }
  std::vector<std::string> strings(const std::string& key) {
    std::vector<std::string> out;
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(where(key) + " must be a list of strings");
      for (const json& e : *v) {
        if (!e.is_string()) throw ConfigError(where(key) + " must be a list of strings");
        out.push_back(e.get<std::string>());
      }
    }
    return out;
  }
  std::optional<Table> sub(const std::string& key) {
    if (const json* v = find(key)) return Table(*v, where(key));
    return std::nullopt;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) throw ConfigError("unknown config key '" + where(item.key()) + "'");
  }

 private:
  std::string label() const { return path_.empty() ? "config root" : "'" + path_ + "'"; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

Benchmark parse_benchmark(const std::string& s) {
  if (s == "f4_1d") return Benchmark::f4_1d;
  if (s == "camelback") return Benchmark::camelback;
  throw ConfigError("unknown benchmark '" + s + "' (expected f4_1d or camelback)");
}

CalibrationScenario parse_scenario(const std::string& s, const CalibrationConfig& c) {
  for (Covariates cov : {Covariates::adaptive, Covariates::iid})
    for (ThetaKind th : {ThetaKind::zero, ThetaKind::random}) {
      CalibrationScenario sc{cov, th, c.dim, c.n_actions, c.theta_norm};
      if (scenario_name(sc) == s) return sc;
    }
  throw ConfigError("unknown calibration scenario '" + s +
                    "' (expected adaptive|iid followed by _theta_zero or _theta_random)");
}

void read_model(Table t, ModelConfig& m) {
  t.read("family", m.family);
  t.read("sigma", m.sigma);
  t.read("b", m.b);
  t.read("p", m.p);
  t.finish();
  require(m.sigma > 0, "model.sigma must be positive");
  require(m.b > 0, "model.b must be positive");
  require(m.p > 0, "model.p must be positive");
  make_model(m);  // rejects unknown families
}

}  // namespace

ObservationModel make_model(const ModelConfig& m) {
  if (m.family == "gaussian") return ObservationModel::gaussian(m.sigma);
  if (m.family == "poisson") return ObservationModel::poisson();
  if (m.family == "bernoulli") return ObservationModel::bernoulli();
  if (m.family == "laplace") return ObservationModel::laplace(m.b);
  if (m.family == "weibull") return ObservationModel::weibull(m.p);
  throw ConfigError("unknown model family '" + m.family + "'");
}

ExperimentConfig::ExperimentConfig() {
  settings.B = 4.0;
  settings.lambda = 1.0;
  for (Covariates cov : {Covariates::adaptive, Covariates::iid})
    for (ThetaKind th : {ThetaKind::zero, ThetaKind::random})
      calibration.scenarios.push_back({cov, th, calibration.dim, calibration.n_actions, calibration.theta_norm});
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  MethodSettings& s = cfg.settings;
  Table t(root, "");

  if (auto m = t.sub("model")) read_model(*m, cfg.model);

  if (t.find("methods")) {
    cfg.methods.clear();
    for (const std::string& name : t.strings("methods")) {
      const auto m = parse_method(name);
      require(m.has_value(), "unknown method '" + name + "'");
      require(std::find(cfg.methods.begin(), cfg.methods.end(), *m) == cfg.methods.end(),
              "method '" + name + "' listed twice");
      cfg.methods.push_back(*m);
    }
    require(!cfg.methods.empty(), "methods must not be empty");
  }

  t.read("horizon", cfg.run.horizon);
  t.read("alpha", s.alpha);
  t.read("delta", s.delta);
  t.read("lambda", s.lambda);
  t.read("B", s.B);
  t.read("report_bounds", cfg.run.report_bounds);
  t.read("classical_weights", cfg.classical_weights);
  t.read("round_time_budget", cfg.run.round_time_budget);
  t.read("prune", cfg.run.prune);
  t.read("output", cfg.output);

  KernelEnvSpec& ks = cfg.environment.kernel;
  std::string bench = "f4_1d";
  t.read("benchmark", bench);
  ks.benchmark = parse_benchmark(bench);
  if (auto k = t.sub("kernel")) {
    std::string family = "squared_exponential";
    k->read("family", family);
    require(family == "squared_exponential", "kernel.family must be squared_exponential");
    k->read("lengthscale", ks.lengthscale);
    k->finish();
  }
  if (auto g = t.sub("grid")) {
    g->read("size", ks.grid_size);
    g->finish();
  }
  if (auto e = t.sub("environment")) {
    e->read("kind", cfg.environment.kind);
    LinearEnvSpec& ls = cfg.environment.linear;
    e->read("dim", ls.dim);
    e->read("n_actions", ls.n_actions);
    e->read("theta_norm", ls.theta_norm);
    e->read("seed", ls.seed);
    e->finish();
  }
  if (auto sd = t.sub("seeds")) {
    sd->read("base", cfg.base_seed);
    sd->read("count", cfg.n_seeds);
    sd->finish();
  }
  if (auto so = t.sub("solver")) {
    so->read("tol", s.solver.tol);
    so->read("max_iter", s.solver.max_iter);
    so->finish();
  }
  if (auto es = t.sub("estimator")) {
    es->read("use_weights", s.estimator_uses_weights);
    es->read("vaw", s.vaw);
    es->finish();
  }
  if (auto bl = t.sub("baseline")) {
    if (auto se = bl->sub("subexp")) {
      se->read("k", s.subexp_k);
      se->read("nu", s.subexp_nu);
      se->finish();
    }
    bl->finish();
  }
  CalibrationConfig& cal = cfg.calibration;
  if (auto c = t.sub("calibration")) {
    c->read("runs", cal.runs);
    c->read("horizon", cal.horizon);
    c->read("dim", cal.dim);
    c->read("n_actions", cal.n_actions);
    c->read("theta_norm", cal.theta_norm);
    if (const json* a = c->find("alphas")) {
      require(a->is_array() && !a->empty(), "calibration.alphas must be a non-empty list of numbers");
      cal.alphas.clear();
      for (const json& v : *a) {
        require(v.is_number(), "calibration.alphas must be a non-empty list of numbers");
        cal.alphas.push_back(v.get<double>());
      }
    }
    const auto names = c->strings("scenarios");
    c->finish();
    cal.scenarios.clear();
    if (names.empty()) {
      for (Covariates cov : {Covariates::adaptive, Covariates::iid})
        for (ThetaKind th : {ThetaKind::zero, ThetaKind::random})
          cal.scenarios.push_back({cov, th, cal.dim, cal.n_actions, cal.theta_norm});
    }
    for (const std::string& n : names) cal.scenarios.push_back(parse_scenario(n, cal));
  }
  t.finish();

  if (const char* env = std::getenv("LRCS_SEED")) {
    try {
      std::size_t used = 0;
      cfg.base_seed = std::stoull(env, &used);
      require(used == std::string(env).size(), "");
    } catch (const std::exception&) {
      throw ConfigError(std::string("LRCS_SEED is not a non-negative integer: '") + env + "'");
    }
  }

  require(s.alpha > 0 && s.alpha < 1, "alpha must lie in (0, 1)");
  require(s.delta > 0 && s.delta < 1, "delta must lie in (0, 1)");
  require(s.lambda > 0, "lambda must be positive");
  require(s.B > 0, "B must be positive");
  require(cfg.run.horizon >= 1, "horizon must be at least 1");
  require(cfg.n_seeds >= 1, "seeds.count must be at least 1");
  require(s.solver.tol > 0 && s.solver.max_iter >= 1, "solver.tol must be positive and solver.max_iter at least 1");
  require(s.subexp_k > 0 && s.subexp_k < 1, "baseline.subexp.k must lie in (0, 1)");
  require(s.subexp_nu >= 0, "baseline.subexp.nu must be non-negative (0 picks the model default)");
  require(ks.lengthscale > 0, "kernel.lengthscale must be positive");
  require(ks.grid_size >= 1, "grid.size must be at least 1");
  ks.B = s.B;
  const std::string& kind = cfg.environment.kind;
  require(kind == "kernel" || kind == "linear", "environment.kind must be kernel or linear");
  const LinearEnvSpec& ls = cfg.environment.linear;
  require(ls.dim >= 1 && ls.n_actions >= 1, "environment.dim and environment.n_actions must be at least 1");
  require(ls.theta_norm >= 0 && ls.theta_norm <= s.B, "environment.theta_norm must lie in [0, B]");
  require(cal.runs >= 1, "calibration.runs must be at least 1");
  require(cal.horizon >= 1, "calibration.horizon must be at least 1");
  require(cal.dim >= 1 && cal.n_actions >= 1, "calibration.dim and calibration.n_actions must be at least 1");
  require(cal.theta_norm >= 0 && cal.theta_norm <= s.B, "calibration.theta_norm must lie in [0, B]");
  for (double a : cal.alphas) require(a > 0 && a < 1, "calibration.alphas must lie in (0, 1)");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

BanditEnvironment build_environment(const ExperimentConfig& cfg) {
  const ObservationModel model = make_model(cfg.model);
  if (cfg.environment.kind == "linear") return random_linear_environment(cfg.environment.linear, model);
  return kernel_environment(cfg.environment.kernel, model);
}

std::vector<Method> effective_methods(const ExperimentConfig& cfg) {
  std::vector<Method> out;
  for (Method m : cfg.methods) {
    if (cfg.classical_weights && m == Method::lr_weighted) m = Method::lr_classical;
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

}  // namespace lrcs
