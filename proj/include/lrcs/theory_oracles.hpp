#pragma once

#include "lrcs/observation_models.hpp"

#include <span>
#include <vector>

namespace lrcs {

struct GainLedger {
  Matrix V;  // sum mu x x' + lambda I
  double lambda = 1;
  double gamma = 0;  // log det(V / lambda)
  std::vector<double> increments;  // log(1 + mu ||x_s||^2 in the inverse of V before x_s)
};

GainLedger information_gain(const std::vector<Vector>& xs, double mu, double lambda, Index dim);

// Z(theta) = sum w A(x'theta) + (nu/2)||theta||^2 and its gradient. GLMs only.
double log_partition_sum(const ObservationModel& model, const std::vector<Vector>& xs,
                         std::span<const double> ws, double nu, const Vector& theta,
                         Vector* grad = nullptr);

// Bregman divergence of Z between theta1 and theta2.
double bregman_divergence(const ObservationModel& model, const std::vector<Vector>& xs,
                          std::span<const double> ws, double nu, const Vector& theta1,
                          const Vector& theta2);

// log det(W / nu), W = sum w x x'/sigma^2 + nu I. Only the Gaussian family has
// this closed form; other models raise UnsupportedModel.
double bregman_information_gain(const ObservationModel& model, const std::vector<Vector>& xs,
                                std::span<const double> ws, double nu, Index dim);

// Any member theta of the LR set satisfies D(theta, theta*) <= this, w.p. 1 - delta.
double bregman_radius_bound(double L, double mu, double alpha, double delta, double nu, double B,
                            double gamma_bregman, double regret);

// Regret of ridge-regularized FTRL in the estimator game.
double ftrl_regret_bound(double lambda, double B, double L, double mu, double gamma, double delta);

// Regret with the VAW regularizer and bias weights. bias_sq[s] and dgamma[s] per round.
double vaw_regret_bound(double lambda, double B, double L, double mu, double gamma, double delta,
                        std::span<const double> bias_sq, std::span<const double> dgamma);

// Squared ellipsoid radius implied for Gaussian linear bandits with w = 1.
double linear_bandit_beta(double lambda, double B, double sigma, double gamma, double delta);

// Pseudo-regret bound of LR-UCB for Gaussian linear bandits with w = 1.
double linear_bandit_regret_bound(double t, double gamma, double sigma, double lambda, double B,
                                  double delta);

struct PotentialCheck {
  double lhs = 0;           // sum ||u_s||^2 in the inverse of V_s (V_s includes u_s)
  double log_det_ratio = 0; // log det V_t - log det(lambda I)
  double dimension_bound = 0;  // d log(r^2 t / lambda + 1)
};
PotentialCheck elliptical_potential_check(const std::vector<Vector>& us, double lambda, Index dim);

}  // namespace lrcs
