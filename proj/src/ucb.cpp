#include "lrcs/ucb.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>
#include <unordered_map>

namespace lrcs {

struct UcbSolver::Engine {
  struct Inner {
    Vector u;
    double gs;     // g at u as the solver sees it (smoothed for Laplace, never above the exact g)
    double upper;  // rigorous bound on q(eta)
  };

  virtual ~Engine() = default;
  virtual Vector to_engine(const Vector& theta) const = 0;
  virtual Vector to_theta(const Vector& u) const = 0;
  virtual Inner inner(const Vector& xt, double eta, double c, const Vector& warm) const = 0;
  virtual double g_exact(const Vector& u) const = 0;

  // Largest s in [0, 1] with g(a + s (b - a)) <= level, assuming g(a) <= level.
  virtual double segment_limit(const Vector& a, const Vector& b, double level) const {
    if (g_exact(b) <= level) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 48; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (g_exact(a + mid * (b - a)) <= level) lo = mid; else hi = mid;
    }
    return lo;
  }
};

namespace {

double frank_wolfe_gap(const Vector& grad, const Vector& u, double radius) {
  return grad.dot(u) + radius * grad.norm();
}

// g(theta) = 0.5 theta'M theta - b'theta worked in the eigenbasis of M.
class QuadraticEngine final : public UcbSolver::Engine {
 public:
  QuadraticEngine(const LrState& s) : radius_(s.config().radius) {
    const double sigma = s.model().glm().sigma;
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.weighted_gram() / (sigma * sigma));
    Q_ = es.eigenvectors();
    lam_ = es.eigenvalues().cwiseMax(0.0);
    b_ = Q_.transpose() * s.suff_stat();
  }

  Vector to_engine(const Vector& theta) const override { return Q_.transpose() * theta; }
  Vector to_theta(const Vector& u) const override { return Q_ * u; }

  Inner inner(const Vector& xt, double eta, double c, const Vector&) const override {
    const Vector rhs = eta * b_ + xt;
    const Vector eig = eta * lam_;
    const BallQp qp = solve_ball_qp_diagonal(eig, rhs, radius_);
    const Vector& u = qp.u;
    const double F = 0.5 * eig.dot(u.cwiseAbs2()) - rhs.dot(u);
    const Vector grad = eig.cwiseProduct(u) - rhs;
    return {u, g_exact(u), eta * c - F + frank_wolfe_gap(grad, u, radius_)};
  }

  double g_exact(const Vector& u) const override { return 0.5 * lam_.dot(u.cwiseAbs2()) - b_.dot(u); }

  double segment_limit(const Vector& a, const Vector& b, double level) const override {
    if (g_exact(b) <= level) return 1.0;
    const Vector d = b - a;
    const double qa = 0.5 * lam_.dot(d.cwiseAbs2());
    const double qb = lam_.dot(a.cwiseProduct(d)) - b_.dot(d);
    const double qc = g_exact(a) - level;  // <= 0
    double s;
    if (qa <= 0) {
      s = qb > 0 ? -qc / qb : 1.0;
    } else {
      s = (-qb + std::sqrt(std::max(0.0, qb * qb - 4 * qa * qc))) / (2 * qa);
    }
    s = std::clamp(s, 0.0, 1.0);
    // rounding can put the closed-form root just outside; a few nudges fix that
    for (int i = 0; i < 8 && s > 0; ++i) {
      if (g_exact(a + s * d) <= level) return s;
      s = s * (1 - 1e-9) - 1e-15;
    }
    if (s <= 0) return 0.0;
    // cancellation in the root formula: fall back to bisection on [0, s]
    return Engine::segment_limit(a, a + s * d, level) * s;
  }

 private:
  double radius_;
  Matrix Q_;
  Vector lam_, b_;
};

// Any model: observations grouped by identical covariate rows, since bandit
// histories repeat a small set of actions.
class GroupedEngine final : public UcbSolver::Engine {
 public:
  GroupedEngine(const LrState& s, const SolverOptions& inner_opt)
      : model_(s.model()), radius_(s.config().radius), opt_(inner_opt) {
    const auto X = s.data().covariates();
    const Index t = s.size(), d = s.dim();
    std::unordered_map<std::string, Index> seen;
    std::vector<Index> rows;
    group_.resize(t);
    for (Index i = 0; i < t; ++i) {
      std::string key(reinterpret_cast<const char*>(X.row(i).data()), sizeof(double) * d);
      auto [it, fresh] = seen.emplace(std::move(key), static_cast<Index>(rows.size()));
      if (fresh) rows.push_back(i);
      group_[i] = it->second;
    }
    U_.resize(static_cast<Index>(rows.size()), d);
    for (Index j = 0; j < U_.rows(); ++j) U_.row(j) = X.row(rows[j]);
    y_ = s.data().responses();
    w_ = s.data().weights();
    Eigen::ColPivHouseholderQR<Matrix> qr(U_.transpose());
    qr.setThreshold(1e-12);
    Q_ = Matrix(qr.householderQ()).leftCols(qr.rank());
    if (model_.kind() == ObservationModel::Kind::laplace) build_laplace_groups(std::get<LaplaceSpec>(model_.spec()).b);
  }

  Vector to_engine(const Vector& theta) const override { return theta; }
  Vector to_theta(const Vector& u) const override { return u; }

  double g_exact(const Vector& u) const override {
    const Vector z = U_ * u;
    if (!lap_.empty()) {
      double acc = 0;
      for (Index k = 0; k < z.size(); ++k) acc += lap_[k].exact(z[k], lap_b_);
      return acc;
    }
    double acc = 0;
    for (Index i = 0; i < y_.size(); ++i) acc += w_[i] * model_.canonical_nll(z[group_[i]], y_[i]);
    return acc;
  }

  Inner inner(const Vector& xt, double eta, double c, const Vector& warm) const override {
    // The objective only sees theta through U theta and x'theta, so the
    // minimizer lies in span(rows of U, x). Solve there, then certify in full.
    const Index r = Q_.cols();
    const Vector a = Q_.transpose() * xt;
    const Vector resid = xt - Q_ * a;
    const double rho = resid.norm();
    const bool extra = rho > 1e-12 * (1.0 + xt.norm());
    Matrix P(xt.size(), r + (extra ? 1 : 0));
    P.leftCols(r) = Q_;
    if (extra) P.col(r) = resid / rho;
    const Matrix Up = U_ * P;
    const Vector xp = P.transpose() * xt;

    double eps = ObservationModel::laplace_smoothing;
    auto F = [&](const Matrix& M, const Vector& xv, const Vector& th, Vector* grad, Matrix* hess) {
      const Index k = M.rows();
      const Vector z = M * th;
      Vector c1 = Vector::Zero(k), c2 = Vector::Zero(k);
      double val = 0;
      if (!lap_.empty()) {
        for (Index j = 0; j < k; ++j) val += lap_[j].huber(z[j], eps, lap_b_, c1[j], c2[j]);
      } else
      for (Index i = 0; i < y_.size(); ++i) {
        const LossDerivatives l = model_.solver_loss(z[group_[i]], y_[i], eps);
        val += w_[i] * l.value;
        c1[group_[i]] += w_[i] * l.d1;
        c2[group_[i]] += w_[i] * l.curvature;
      }
      if (grad) *grad = eta * (M.transpose() * c1) - xv;
      if (hess) hess->noalias() = eta * (M.transpose() * (c2.asDiagonal() * M));
      return eta * val - xv.dot(th);
    };
    auto Fp = [&](const Vector& th, Vector* grad, Matrix* hess) { return F(Up, xp, th, grad, hess); };

    SolverOptions o = opt_;
    o.tol = opt_.tol * (1.0 + eta);
    BallSolution s;
    if (model_.needs_continuation()) {
      Vector from = P.transpose() * warm;
      for (double e : ObservationModel::laplace_continuation) {
        eps = e;
        s = minimize_in_ball(Fp, radius_, from, o);
        from = s.theta;
      }
    } else {
      s = minimize_in_ball(Fp, radius_, P.transpose() * warm, o);
    }
    Vector theta = P * s.theta;
    if (theta.norm() > radius_) theta *= radius_ / theta.norm();
    Vector grad(theta.size());
    const double Fv = F(U_, xt, theta, &grad, nullptr);
    const double gs = (Fv + xt.dot(theta)) / eta;
    return {theta, gs, eta * c - Fv + frank_wolfe_gap(grad, theta, radius_)};
  }

 private:
  // Responses of one action sorted, with prefix sums of w and w y, so the
  // linear tails of the Laplace loss cost a binary search. Points inside the
  // smoothing window are summed directly; there are few and the quadratic
  // part would cancel badly in prefix form.
  struct LaplaceGroup {
    std::vector<double> y, w, W, WY;  // W, WY have size n + 1

    double tails(double z, double half, std::size_t lo, std::size_t hi, double b, double& d1) const {
      const double wl = W[lo], wyl = WY[lo];
      const double wr = W.back() - W[hi], wyr = WY.back() - WY[hi];
      d1 += (wl - wr) / b;
      return ((z - half) * wl - wyl + wyr - (z + half) * wr) / b;
    }
    double exact(double z, double b) const {
      const std::size_t m = std::lower_bound(y.begin(), y.end(), z) - y.begin();
      double unused = 0;
      return tails(z, 0.0, m, m, b, unused);
    }
    double huber(double z, double eps, double b, double& d1, double& curv) const {
      const std::size_t lo = std::lower_bound(y.begin(), y.end(), z - eps) - y.begin();
      const std::size_t hi = std::upper_bound(y.begin() + lo, y.end(), z + eps) - y.begin();
      double val = tails(z, 0.5 * eps, lo, hi, b, d1);
      for (std::size_t i = lo; i < hi; ++i) {
        const double r = y[i] - z;
        val += w[i] * r * r / (2 * eps * b);
        d1 -= w[i] * r / (eps * b);
        curv += w[i] / (eps * b);
      }
      return val;
    }
  };

  void build_laplace_groups(double b) {
    lap_b_ = b;
    lap_.resize(U_.rows());
    std::vector<Index> order(y_.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return y_[i] < y_[j]; });
    for (Index i : order) {
      lap_[group_[i]].y.push_back(y_[i]);
      lap_[group_[i]].w.push_back(w_[i]);
    }
    for (LaplaceGroup& g : lap_) {
      g.W.assign(1, 0.0);
      g.WY.assign(1, 0.0);
      for (std::size_t i = 0; i < g.y.size(); ++i) {
        g.W.push_back(g.W.back() + g.w[i]);
        g.WY.push_back(g.WY.back() + g.w[i] * g.y[i]);
      }
    }
  }

  const ObservationModel& model_;
  double radius_;
  SolverOptions opt_;
  std::vector<LaplaceGroup> lap_;
  double lap_b_ = 1;
  Matrix U_;
  Matrix Q_;  // orthonormal basis of the row space of U_
  std::vector<Index> group_;
  Vector y_, w_;
};

}  // namespace

UcbSolver::UcbSolver(const LrState& state, UcbOptions opt)
    : state_(state), opt_(opt), c_(state.threshold().total()) {
  if (state.size() > 0) {
    if (state.model().kind() == ObservationModel::Kind::gaussian)
      engine_ = std::make_unique<QuadraticEngine>(state);
    else
      engine_ = std::make_unique<GroupedEngine>(state, opt_.inner);
  }

  // Interior point for strong duality: the running estimate, or the
  // constrained likelihood maximizer when the estimator ignores weights.
  center_ = state.current_estimate().theta;
  if (state.size() == 0) return;
  if (engine_->g_exact(engine_->to_engine(center_)) <= c_) return;
  const Engine::Inner mle = engine_->inner(Vector::Zero(engine_->to_engine(center_).size()), 1.0, c_,
                                           engine_->to_engine(center_));
  const Vector cand = engine_->to_theta(mle.u);
  if (engine_->g_exact(mle.u) <= c_) {
    center_ = cand;
    return;
  }
  throw InfeasibleSet("confidence set is empty: neither the running estimate nor the likelihood "
                      "maximizer satisfies the threshold (round " + std::to_string(state.size()) + ")");
}

UcbSolver::~UcbSolver() = default;

double UcbSolver::dual_bound(const Vector& x, double eta, const Vector* warm) const {
  require_dim(x.size(), state_.dim(), "dual_bound");
  const double cap = state_.config().radius * x.norm();
  if (state_.size() == 0 || eta <= 0) return cap;
  const Vector xt = engine_->to_engine(x);
  const Vector& from = warm && warm->size() == x.size() ? *warm : center_;
  return engine_->inner(xt, eta, c_, engine_->to_engine(from)).upper;
}

UcbResult UcbSolver::solve(const Vector& x, double eta_hint) const {
  require_dim(x.size(), state_.dim(), "ucb x");
  const double R = state_.config().radius;
  const double xn = x.norm();
  UcbResult res;
  if (xn == 0.0) {
    res.theta = center_;
    res.certified = true;
    return res;
  }
  const Vector ball_point = (R / xn) * x;
  const double cap = R * xn;
  // keep primal points a hair inside so they survive re-evaluation through a different code path
  const double level = c_ - 1e-10 * (1.0 + std::abs(c_));
  if (state_.size() == 0 || engine_->g_exact(engine_->to_engine(ball_point)) <= level) {
    res.value = res.primal = res.dual_at_eta = cap;
    res.theta = ball_point;
    res.certified = true;
    return res;
  }

  const Vector xt = engine_->to_engine(x);
  const Vector center_u = engine_->to_engine(center_);
  double best_upper = cap, best_eta = 0, best_dual = cap;
  Vector best_inner;
  double best_primal = xt.dot(center_u);
  Vector best_u = center_u;

  struct Side {
    bool set = false;
    double logeta = 0, h = 0;
    Vector u;
  };
  Side lo, hi;  // lo: g above c (eta too small); hi: g below c
  Vector warm = center_u;

  const double lmin = std::log(opt_.eta_min), lmax = std::log(opt_.eta_max);
  auto tolerance = [&] { return opt_.rel_gap * (1.0 + std::abs(best_upper)); };

  auto consider_primal = [&](const Vector& u) {
    const double v = xt.dot(u);
    if (v > best_primal) {
      best_primal = v;
      best_u = u;
    }
  };
  auto refine_primal = [&] {
    if (!lo.set) return;
    const Vector& base = hi.set ? hi.u : center_u;
    const double s = engine_->segment_limit(base, lo.u, level);
    consider_primal(base + s * (lo.u - base));
  };

  // returns -1 when the low side moved, +1 for the high side
  auto evaluate = [&](double logeta) {
    const double eta = std::exp(logeta);
    Engine::Inner in = engine_->inner(xt, eta, c_, warm);
    ++res.evaluations;
    warm = in.u;
    if (in.upper < best_upper) {
      best_upper = in.upper;
      best_eta = eta;
      best_dual = in.upper;
      best_inner = in.u;
    }
    const double h = c_ - in.gs;
    if (h >= 0 && engine_->g_exact(in.u) <= level) {
      consider_primal(in.u);
      if (!hi.set || logeta < hi.logeta) hi = {true, logeta, h, in.u};
      return 1;
    }
    // h >= 0 here means the smoothed g accepts a point the exact one rejects
    if (!lo.set || logeta > lo.logeta) lo = {true, logeta, std::min(h, -1e-300), in.u};
    return -1;
  };

  const double u0 = std::clamp(std::log(eta_hint > 0 ? eta_hint : 1.0), lmin, lmax);
  evaluate(u0);

  // expand until the root of c - g(theta(eta)) is bracketed
  double step = 1.0;
  while (res.evaluations < opt_.max_evals && !(lo.set && hi.set)) {
    if (!hi.set) {
      if (lo.logeta >= lmax) break;
      evaluate(std::min(lmax, lo.logeta + step));
    } else {
      if (hi.logeta <= lmin) break;
      evaluate(std::max(lmin, hi.logeta - step));
    }
    step *= 2;
  }

  // Illinois false position on log eta
  double hl = lo.h, hh = hi.h;
  int last = 0;
  while (lo.set && hi.set && res.evaluations < opt_.max_evals) {
    refine_primal();
    if (best_upper - best_primal <= tolerance()) break;
    const double width = hi.logeta - lo.logeta;
    if (width <= 1e-13) break;
    double next = lo.logeta - hl * width / (hh - hl);
    const double margin = 1e-3 * width;
    if (!(next > lo.logeta + margin && next < hi.logeta - margin)) next = lo.logeta + 0.5 * width;
    const int side = evaluate(next);
    if (side < 0) {
      hl = lo.h;
      if (last < 0) hh *= 0.5;
    } else {
      hh = hi.h;
      if (last > 0) hl *= 0.5;
    }
    last = side;
  }
  refine_primal();

  res.primal = best_primal;
  res.theta = engine_->to_theta(best_u);
  res.value = std::max(std::min(best_upper, cap), best_primal);
  res.eta = best_eta;
  res.dual_at_eta = best_dual;
  if (best_inner.size()) res.eta_theta = engine_->to_theta(best_inner);
  res.gap = res.value - res.primal;
  res.certified = res.gap <= opt_.rel_gap * (1.0 + std::abs(res.value));
  return res;
}

double ucb_value(const LrState& state, const Vector& x) { return UcbSolver(state).solve(x).value; }

}  // namespace lrcs
