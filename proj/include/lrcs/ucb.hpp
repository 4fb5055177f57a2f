#pragma once

#include "lrcs/confidence_core.hpp"

#include <memory>

namespace lrcs {

struct UcbOptions {
  double eta_min = 1e-6;
  double eta_max = 1e6;
  double rel_gap = 1e-5;  // certificate: gap <= rel_gap * (1 + |value|)
  int max_evals = 80;
  SolverOptions inner{1e-10, 100, 1e-4, 0.5};
};

struct UcbResult {
  double value = 0;   // upper bound on max x'theta over the set (dual value)
  double primal = 0;  // x'theta at `theta`, which is a member
  Vector theta;
  double eta = 0;  // multiplier where the bound was attained; 0 when the ball point is feasible
  double dual_at_eta = 0;  // q(eta) before capping at B||x||
  Vector eta_theta;        // inner maximizer at eta; empty when eta = 0
  double gap = 0;
  bool certified = false;
  int evaluations = 0;
};

// max x'theta over {||theta|| <= B, log_ratio(theta) <= log(1/alpha)} by
// minimizing the Lagrangian dual q(eta) = eta c + max_ball [x'theta - eta g(theta)]
// over log eta. The inner problem is concave; the interior point needed for
// strong duality is the running estimate.
class UcbSolver {
 public:
  explicit UcbSolver(const LrState& state, UcbOptions opt = {});
  ~UcbSolver();
  UcbSolver(const UcbSolver&) = delete;
  UcbSolver& operator=(const UcbSolver&) = delete;

  UcbResult solve(const Vector& x, double eta_hint = 1.0) const;

  // Rigorous upper bound q(eta) for a single multiplier. warm seeds the inner
  // solve, e.g. with eta_theta from an earlier solve for the same x.
  double dual_bound(const Vector& x, double eta, const Vector* warm = nullptr) const;

  const Vector& center() const { return center_; }
  double threshold() const { return c_; }

  struct Engine;

 private:
  const LrState& state_;
  UcbOptions opt_;
  double c_;
  Vector center_;
  std::unique_ptr<Engine> engine_;
};

double ucb_value(const LrState& state, const Vector& x);

}  // namespace lrcs
