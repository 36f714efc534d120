#pragma once

#include "lqgid/designsdp.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lqgid {

class InfeasiblePoint : public Error {
 public:
  using Error::Error;
};

// Joint law of (recommendation profile, state). Recommendations are the
// actions themselves: agent i is told to play sigma_i and does.
struct GaussianInfoStructure {
  int n = 0;
  int m = 0;
  Vector mean;    // (a_bar, theta_bar)
  SymMatrix cov;  // [[X, Y], [Y^T, Z]]

  Matrix X() const { return cov.mat().topLeftCorner(n, n); }
  Matrix Y() const { return cov.mat().topRightCorner(n, m); }
  Matrix Z() const { return cov.mat().bottomRightCorner(m, m); }
};

struct Metrics {
  // s_i: share of agent i's personal-state variance removed by sigma_i,
  // S_i: the same conditioning on the whole profile, N_i: share of Var[sigma_i]
  // left after conditioning on the state. Absent when the denominator is 0.
  std::vector<std::optional<double>> s;
  std::vector<std::optional<double>> S;
  std::vector<std::optional<double>> N;
};

struct ConditionalTest {
  bool holds = false;
  SymMatrix conditional_cov;
};

// Throws InfeasiblePoint unless the point passes is_primal_feasible(tol).
GaussianInfoStructure from_primal(const Environment& env, const PrimalPoint& point, double tol = 1e-8);

// No feasibility check. Used for negative controls.
GaussianInfoStructure unchecked_structure(const Environment& env, const PrimalPoint& point);

// Var[sigma | theta] = X - Y Z^+ Y^T, zero within tol (1 + ||X||_F).
ConditionalTest noise_freeness(const GaussianInfoStructure& gis, double tol = 1e-6);
// Var[theta | sigma] = Z - Y^T X^+ Y, zero within tol (1 + ||Z||_F).
ConditionalTest state_identifiability(const GaussianInfoStructure& gis, double tol = 1e-6);

// Personal states are R theta; with R = I these are the state components.
Metrics metrics(const Environment& env, const GaussianInfoStructure& gis);

struct McObedience {
  long count = 0;
  // Largest |z-score| over agents for each check. z = deviation / standard error;
  // a check with zero sampling spread and zero deviation reports 0.
  double moment1_residual = 0;  // Q mean(sigma) - R mean(theta)
  double moment2_residual = 0;  // diag(X_hat Q^T) - diag(Y_hat R^T)
  double foc_regression_residual = 0;  // slope of q_i.sigma - r_i.theta on sigma_i
  bool passed(double band = 5.0) const {
    return moment1_residual <= band && moment2_residual <= band && foc_regression_residual <= band;
  }
};

// Streams count draws of (sigma, theta) from gis with a CounterRng seeded by seed.
McObedience mc_obedience(const Environment& env, const GaussianInfoStructure& gis, long count,
                         std::uint64_t seed);

}  // namespace lqgid
