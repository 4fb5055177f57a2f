#include "doctest.h"
#include "oracles.hpp"

#include "lrcs/ball_solver.hpp"

using namespace lrcs;

TEST_SUITE("ball_solver") {
  TEST_CASE("ball QP agrees with a brute force scan in 2D") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int inst = 0; inst < 30; ++inst) {
      Matrix A = Matrix::Random(2, 2);
      Matrix H = A * A.transpose();
      if (inst % 3 == 0) H = Vector(Eigen::Vector2d(u(rng) * u(rng), 0.0)).cwiseAbs().asDiagonal();  // singular
      const Vector r = Eigen::Vector2d(u(rng), u(rng));
      const double R = 0.5 + std::abs(u(rng));
      const Vector s = solve_ball_qp(H, r, R);
      auto f = [&](const Vector& v) { return 0.5 * v.dot(H * v) - r.dot(v); };
      double best = 1e300;
      for (int i = 0; i < 2000; ++i) {
        const double a = 2 * M_PI * i / 2000;
        for (double rho : {R, 0.999 * R}) best = std::min(best, f(Eigen::Vector2d(rho * std::cos(a), rho * std::sin(a))));
      }
      CHECK(s.norm() <= R * (1 + 1e-12));
      CHECK(f(s) <= best + 1e-9);
    }
  }

  TEST_CASE("interior quadratic solves exactly") {
    Matrix H(2, 2);
    H << 2, 0.5, 0.5, 1;
    const Vector g0 = Eigen::Vector2d(0.3, -0.2);
    Objective f = [&](const Vector& th, Vector* g, Matrix* h) {
      if (g) *g = H * th - g0;
      if (h) *h = H;
      return 0.5 * th.dot(H * th) - g0.dot(th);
    };
    const BallSolution s = minimize_in_ball(f, 10.0, Vector::Zero(2));
    CHECK(s.converged);
    CHECK((s.theta - H.ldlt().solve(g0)).norm() < 1e-12);
  }

  TEST_CASE("projected gradient norm is zero at a KKT point on the sphere") {
    const Vector th = Eigen::Vector2d(0.6, 0.8);
    CHECK(projected_gradient_norm(th, -2.0 * th, 1.0) == doctest::Approx(0.0));
    CHECK(projected_gradient_norm(th, 2.0 * th, 1.0) == doctest::Approx(2.0));
    CHECK(projected_gradient_norm(0.5 * th, -2.0 * th, 1.0) == doctest::Approx(2.0));
  }
}
