#include "lrcs/ball_solver.hpp"

#include <cmath>
#include <optional>

namespace lrcs {

Vector project_to_ball(Vector v, double radius) {
  const double n = v.norm();
  if (n > radius) v *= radius / n;
  return v;
}

double projected_gradient_norm(const Vector& theta, const Vector& grad, double radius) {
  const double n = theta.norm();
  if (n < radius * (1 - 1e-10) || n == 0.0) return grad.norm();
  const Vector dir = theta / n;
  const double radial = grad.dot(dir);
  const double tangential2 = (grad - radial * dir).squaredNorm();
  // an inward-pointing gradient (radial < 0) is balanced by the constraint
  const double outward = std::max(0.0, radial);
  return std::sqrt(tangential2 + outward * outward);
}

BallQp solve_ball_qp_diagonal(const Vector& eig_in, const Vector& rhs, double radius) {
  const Index d = eig_in.size();
  const Vector eig = eig_in.cwiseMax(0.0);
  const double scale = std::max(1.0, eig.maxCoeff());
  const double tiny = 1e-13 * scale;

  auto u_at = [&](double nu) {
    Vector u(d);
    for (Index i = 0; i < d; ++i) {
      const double den = eig[i] + nu;
      u[i] = den > 0 ? rhs[i] / den : 0.0;
    }
    return u;
  };

  // interior solution (pseudo-inverse when singular and rhs has no null-space part)
  bool range_ok = true;
  for (Index i = 0; i < d; ++i)
    if (eig[i] <= tiny && std::abs(rhs[i]) > 0) range_ok = false;
  if (range_ok) {
    Vector u(d);
    for (Index i = 0; i < d; ++i) u[i] = eig[i] > tiny ? rhs[i] / eig[i] : 0.0;
    if (u.norm() <= radius) return {u, 0.0};
  }

  const double rnorm = rhs.norm();
  if (rnorm == 0.0) return {Vector::Zero(d), 0.0};

  // phi(nu) = 1/||u(nu)|| - 1/radius is increasing and convex; safeguarded Newton
  double lo = 0.0, hi = rnorm / radius;
  double nu = hi;
  for (int it = 0; it < 200; ++it) {
    double s2 = 0, s3 = 0;
    for (Index i = 0; i < d; ++i) {
      const double den = eig[i] + nu;
      if (den <= 0) continue;
      const double q = rhs[i] / den;
      s2 += q * q;
      s3 += q * q / den;
    }
    const double n = std::sqrt(s2);
    const double phi = 1.0 / n - 1.0 / radius;
    if (std::abs(n - radius) <= 1e-14 * radius) break;
    if (phi < 0) lo = nu; else hi = nu;
    const double dphi = s3 / (n * n * n);
    double next = dphi > 0 ? nu - phi / dphi : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = lo > 0 ? 0.5 * (lo + hi) : 0.5 * hi;
    if (hi - lo <= 1e-17 * std::max(1.0, hi)) break;
    nu = next;
  }
  Vector u = u_at(nu);
  const double n = u.norm();
  if (n > 0) u *= radius / n;
  return {u, nu};
}

Vector solve_ball_qp(const Matrix& H, const Vector& rhs, double radius) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  const Matrix& Q = es.eigenvectors();
  BallQp s = solve_ball_qp_diagonal(es.eigenvalues(), Q.transpose() * rhs, radius);
  return Q * s.u;
}

namespace {

// Boundary solution of min 0.5 v'Hv - r'v over ||v|| <= R for PSD H, by
// Newton on the secular equation 1/||(H + nu I)^-1 r|| = 1/R. Starts from
// the caller's nu, which carries over between nearby Newton steps. Gives up
// (nullopt) in the degenerate case where the solution is interior with a
// singular H; the eigen path handles that.
std::optional<Vector> boundary_step(const Matrix& H, const Vector& r, double R, double& nu) {
  const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  const double floor = 1e-14 * scale;
  const Matrix I = Matrix::Identity(H.rows(), H.cols());
  nu = std::max(nu, floor);
  for (int it = 0; it < 40; ++it) {
    Eigen::LLT<Matrix> llt(H + nu * I);
    if (llt.info() != Eigen::Success) {
      nu *= 4;
      continue;
    }
    const Vector p = llt.solve(r);
    const double pn = p.norm();
    if (!std::isfinite(pn) || pn == 0) return std::nullopt;
    if (std::abs(pn - R) <= 1e-9 * R) return Vector(p * (R / pn));
    const Vector q = llt.matrixL().solve(p);
    const double next = nu + (pn * pn / q.squaredNorm()) * (pn - R) / R;
    if (next <= floor) {
      if (nu <= floor) return std::nullopt;  // interior with singular H
      nu = std::max(floor, 0.1 * nu);
    } else {
      nu = next;
    }
  }
  return std::nullopt;
}

// Minimizer over the ball of the Newton model g'(v - theta) + 0.5 (v - theta)'H(v - theta).
Vector newton_target(const Matrix& H, const Vector& g, const Vector& theta, double radius, double& nu) {
  const Vector r = H * theta - g;
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() == Eigen::Success) {
    Vector v = llt.solve(r);
    if (v.allFinite() && v.norm() <= radius) {
      nu = 0;
      return v;
    }
  }
  if (auto v = boundary_step(H, r, radius, nu)) return *v;
  nu = 0;
  return solve_ball_qp(H, r, radius);
}

}  // namespace

BallSolution minimize_in_ball(const Objective& f, double radius, const Vector& start,
                              const SolverOptions& opt) {
  BallSolution out;
  out.theta = project_to_ball(start, radius);
  const Index d = out.theta.size();
  Vector g(d);
  Matrix H(d, d);
  double val = f(out.theta, &g, &H);
  double nu = 0;  // trust-region multiplier of the last Newton step

  for (int it = 0; it < opt.max_iter; ++it) {
    out.pg_norm = projected_gradient_norm(out.theta, g, radius);
    if (out.pg_norm <= opt.tol) {
      out.converged = true;
      break;
    }
    ++out.iterations;

    Vector dir = newton_target(H, g, out.theta, radius, nu) - out.theta;
    double slope = g.dot(dir);
    const double predicted = -(slope + 0.5 * dir.dot(H * dir));
    if (predicted <= 1e-12 * (1 + std::abs(val))) {
      // f can no longer resolve the decrease (and on the sphere the chord's
      // slope can even be positive); judge the full step by its gradient
      const Vector trial = project_to_ball(out.theta + dir, radius);
      Vector g2(d);
      Matrix H2(d, d);
      const double v2 = f(trial, &g2, &H2);
      if (!(projected_gradient_norm(trial, g2, radius) < out.pg_norm)) break;
      out.theta = trial;
      g = std::move(g2);
      H = std::move(H2);
      val = v2;
      continue;
    }
    if (!(slope < 0)) {
      // model gave nothing; projected gradient step scaled by the curvature
      const double hn = std::max(H.norm(), 1e-12);
      dir = project_to_ball(out.theta - g / hn, radius) - out.theta;
      slope = g.dot(dir);
      if (!(slope < 0)) break;
    }

    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector trial = out.theta + step * dir;
      if (trial == out.theta) break;
      const double fv = f(trial, nullptr, nullptr);
      if (fv <= val + opt.armijo * step * slope) {
        out.theta = trial;
        accepted = true;
        break;
      }
      step *= opt.shrink;
    }
    if (!accepted) break;
    val = f(out.theta, &g, &H);
  }
  out.pg_norm = projected_gradient_norm(out.theta, g, radius);
  if (!out.converged) out.converged = out.pg_norm <= opt.tol;
  out.value = val;
  return out;
}

}  // namespace lrcs
