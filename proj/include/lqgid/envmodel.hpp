#pragma once

#include "lqgid/matcore.hpp"

#include <optional>
#include <utility>

namespace lqgid {

class BasicAssumptionViolated : public Error {
 public:
  using Error::Error;
};

class DegenerateState : public Error {
 public:
  using Error::Error;
};

class BetaOutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidNetwork : public Error {
 public:
  using Error::Error;
};

class PdcNotSatisfied : public Error {
 public:
  using Error::Error;
};

// Agents' best responses solve Q a = R E[theta | signal]; the designer
// maximizes V • Var[a] + W • Cov[a, theta]. theta ~ (theta_mean, Z).
struct Environment {
  int n = 0;
  int m = 0;
  Matrix Q;
  Matrix R;
  SymMatrix V;
  Matrix W;
  SymMatrix Z;
  Vector theta_mean;
};

struct NetworkSpec {
  int n = 0;
  Matrix G;
  double beta = 0.0;
};

Environment make_environment(const Matrix& Q, const Matrix& R, const Matrix& V, const Matrix& W,
                             const Matrix& Z, const Vector& theta_mean);

// Open interval of beta for which I - beta G satisfies the basic assumption.
// Infinite ends are returned as +-infinity.
std::pair<double, double> admissible_beta(const Matrix& G);

// Validates G (zero diagonal, nonnegative) and beta (strictly inside the
// admissible interval, margin 1e-9).
NetworkSpec make_network(const Matrix& G, double beta);

Matrix complete_graph(int n);
Matrix cycle_graph(int n);
// Node 0 is the hub.
Matrix star_graph(int n);

// Q = I - beta G, R = I.
Environment network_environment(const NetworkSpec& net, const Matrix& V, const Matrix& W,
                                const Matrix& Z, std::optional<Vector> theta_mean = std::nullopt);

// V = Diag(v_i q_ii), W = O.
Environment welfare_environment(const Matrix& Q, const Matrix& R, const Matrix& Z,
                                const Vector& theta_mean, const Vector& weights);
Environment welfare_environment(const NetworkSpec& net, const Matrix& Z, const Vector& weights);

// Common-value state covariance (all ones) and the equicorrelated one.
SymMatrix common_state(int n);
SymMatrix equicorrelated_state(int n, double rho);

// Diagonal of Delta with W = Delta R, if it exists.
std::optional<Vector> pdc_check(const Environment& env);

// V <- V + (Delta Q + Q^T Delta)/2, W <- O.
Environment pdc_transform(const Environment& env);

// R = I and W diagonal.
bool is_personal_state(const Environment& env);

Vector mean_actions(const Environment& env);

// Q^{-1} R.
Matrix response_map(const Environment& env);

// Cbar with full-disclosure value Cbar • Z.
SymMatrix disclosure_objective(const Environment& env);

double full_disclosure_value(const Environment& env);
double no_disclosure_value(const Environment& env);

}  // namespace lqgid
