#include "lrcs/snapshot.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace lrcs {

using json = nlohmann::json;

namespace {

constexpr int kVersion = 1;

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vec(const json& j) {
  const auto xs = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(xs.data(), static_cast<Index>(xs.size()));
}

json model_json(const ObservationModel& m) {
  json j{{"family", m.name()}};
  switch (m.kind()) {
    case ObservationModel::Kind::gaussian: j["sigma"] = m.glm().sigma; break;
    case ObservationModel::Kind::laplace: j["b"] = std::get<LaplaceSpec>(m.spec()).b; break;
    case ObservationModel::Kind::weibull: j["p"] = std::get<WeibullSurvivalSpec>(m.spec()).p; break;
    default: break;
  }
  return j;
}

ObservationModel model_from(const json& j) {
  const std::string f = j.at("family").get<std::string>();
  if (f == "gaussian") return ObservationModel::gaussian(j.at("sigma").get<double>());
  if (f == "poisson") return ObservationModel::poisson();
  if (f == "bernoulli") return ObservationModel::bernoulli();
  if (f == "laplace") return ObservationModel::laplace(j.at("b").get<double>());
  if (f == "weibull") return ObservationModel::weibull(j.at("p").get<double>());
  throw std::invalid_argument("snapshot: unknown model family '" + f + "'");
}

}  // namespace

std::string state_to_json(const LrState& state) {
  const LrConfig& c = state.config();
  json cfg{{"model", model_json(c.model)},
           {"radius", c.radius},
           {"lambda", c.lambda},
           {"alpha", c.alpha},
           {"weighting", c.weighting == Weighting::adaptive ? "adaptive" : "classical"},
           {"estimator_uses_weights", c.estimator_uses_weights},
           {"vaw", c.vaw},
           {"solver",
            {{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}, {"armijo", c.solver.armijo},
             {"shrink", c.solver.shrink}}}};
  json rounds = json::array();
  for (const Round& r : state.rounds())
    rounds.push_back({{"x", vec(r.x)},
                      {"y", r.y},
                      {"w", r.w},
                      {"theta_hat", vec(r.theta_hat)},
                      {"est_nll", r.est_nll},
                      {"solver_converged", r.solver_converged}});
  json root{{"format", "lrcs-state"}, {"version", kVersion}, {"config", cfg}, {"dim", state.dim()},
            {"rounds", rounds}};
  return root.dump();
}

LrState state_from_json(const std::string& text) {
  try {
    const json root = json::parse(text);
    if (root.at("format") != "lrcs-state") throw std::invalid_argument("snapshot: not an lrcs state file");
    if (root.at("version").get<int>() != kVersion)
      throw std::invalid_argument("snapshot: unsupported version " + root.at("version").dump());
    const json& c = root.at("config");
    LrConfig cfg;
    cfg.model = model_from(c.at("model"));
    cfg.radius = c.at("radius").get<double>();
    cfg.lambda = c.at("lambda").get<double>();
    cfg.alpha = c.at("alpha").get<double>();
    cfg.weighting = c.at("weighting").get<std::string>() == "classical" ? Weighting::classical : Weighting::adaptive;
    cfg.estimator_uses_weights = c.at("estimator_uses_weights").get<bool>();
    cfg.vaw = c.at("vaw").get<bool>();
    const json& s = c.at("solver");
    cfg.solver.tol = s.at("tol").get<double>();
    cfg.solver.max_iter = s.at("max_iter").get<int>();
    cfg.solver.armijo = s.at("armijo").get<double>();
    cfg.solver.shrink = s.at("shrink").get<double>();

    LrState state(cfg, root.at("dim").get<Index>());
    for (const json& r : root.at("rounds")) {
      Round round;
      round.x = vec(r.at("x"));
      round.y = r.at("y").get<double>();
      round.w = r.at("w").get<double>();
      round.theta_hat = vec(r.at("theta_hat"));
      round.est_nll = r.at("est_nll").get<double>();
      round.solver_converged = r.at("solver_converged").get<bool>();
      state.restore_round(round);
    }
    return state;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("snapshot: malformed state: ") + e.what());
  }
}

void save_state(const LrState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << state_to_json(state) << '\n';
}

LrState load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return state_from_json(ss.str());
}

}  // namespace lrcs
