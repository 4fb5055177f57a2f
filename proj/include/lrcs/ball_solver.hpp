#pragma once

#include "lrcs/common.hpp"

#include <functional>

namespace lrcs {

struct SolverOptions {
  double tol = 1e-8;  // on the projected-gradient (KKT residual) norm
  int max_iter = 200;
  double armijo = 1e-4;
  double shrink = 0.5;
};

// Value of a convex objective; fills grad/hess when the pointers are non-null.
using Objective = std::function<double(const Vector& theta, Vector* grad, Matrix* hess)>;

struct BallSolution {
  Vector theta;
  double value = 0;
  double pg_norm = 0;
  int iterations = 0;
  bool converged = false;
};

Vector project_to_ball(Vector v, double radius);

// Norm of the part of grad that violates the KKT conditions of min f s.t. ||theta|| <= radius.
double projected_gradient_norm(const Vector& theta, const Vector& grad, double radius);

// argmin 0.5 u'diag(eig)u - rhs'u over ||u|| <= radius, eig >= 0.
// multiplier is the ball constraint's Lagrange multiplier (0 when inactive).
struct BallQp {
  Vector u;
  double multiplier = 0;
};
BallQp solve_ball_qp_diagonal(const Vector& eig, const Vector& rhs, double radius);

// Same problem with a dense PSD matrix.
Vector solve_ball_qp(const Matrix& H, const Vector& rhs, double radius);

// Damped Newton where each step minimizes the local quadratic model over the
// ball (not a radial projection of the unconstrained step), then backtracks
// along the segment, which stays feasible by convexity of the ball.
BallSolution minimize_in_ball(const Objective& f, double radius, const Vector& start,
                              const SolverOptions& opt = {});

}  // namespace lrcs
