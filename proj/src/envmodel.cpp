#include "lqgid/envmodel.hpp"

#include <cmath>
#include <limits>

namespace lqgid {

Environment make_environment(const Matrix& Q, const Matrix& R, const Matrix& V, const Matrix& W,
                             const Matrix& Z, const Vector& theta_mean) {
  const int n = static_cast<int>(Q.rows());
  const int m = static_cast<int>(R.cols());
  if (n < 1 || m < 1) throw DimensionMismatch("environment needs n >= 1 and m >= 1");
  if (Q.cols() != n || R.rows() != n || V.rows() != n || V.cols() != n || W.rows() != n ||
      W.cols() != m || Z.rows() != m || Z.cols() != m || theta_mean.size() != m)
    throw DimensionMismatch("environment: matrix dimensions are not conformable");
  require_finite(Q, "Q");
  require_finite(R, "R");
  require_finite(W, "W");
  require_finite(theta_mean, "theta_mean");

  Environment env;
  env.n = n;
  env.m = m;
  env.Q = Q;
  env.R = R;
  env.V = SymMatrix(V);
  env.W = W;
  env.Z = SymMatrix(Z);
  env.theta_mean = theta_mean;

  const double qmin = eig_sym(SymMatrix(Q + Q.transpose())).values(n - 1);
  if (!(qmin > 1e-10)) throw BasicAssumptionViolated("Q + Q^T is not positive definite");
  for (int k = 0; k < m; ++k)
    if (!(env.Z(k, k) > 0)) throw DegenerateState("state variance Z[k][k] must be positive");
  if (!is_psd(env.Z, 1e-9).psd) throw DegenerateState("state covariance Z is not PSD");
  return env;
}

std::pair<double, double> admissible_beta(const Matrix& G) {
  const Vector mu = eig_sym(SymMatrix(G)).values;  // SymMatrix symmetrizes to (G + G^T)/2
  const double inf = std::numeric_limits<double>::infinity();
  const double mu_max = mu(0), mu_min = mu(mu.size() - 1);
  const double lo = mu_min < 0 ? 1.0 / mu_min : -inf;
  const double hi = mu_max > 0 ? 1.0 / mu_max : inf;
  return {lo, hi};
}

NetworkSpec make_network(const Matrix& G, double beta) {
  const int n = static_cast<int>(G.rows());
  if (n < 1 || G.cols() != n) throw InvalidNetwork("adjacency matrix must be square");
  require_finite(G, "G");
  if (!std::isfinite(beta)) throw BetaOutOfRange("beta must be finite");
  for (int i = 0; i < n; ++i) {
    if (G(i, i) != 0.0) throw InvalidNetwork("adjacency matrix must have zero diagonal");
    for (int j = 0; j < n; ++j)
      if (G(i, j) < 0) throw InvalidNetwork("adjacency weights must be nonnegative");
  }
  const Vector mu = eig_sym(SymMatrix(G)).values;
  const double mu_max = mu(0), mu_min = mu(n - 1);
  if (1.0 - beta * mu_max < 1e-9 || 1.0 - beta * mu_min < 1e-9) {
    const auto [lo, hi] = admissible_beta(G);
    throw BetaOutOfRange("beta = " + std::to_string(beta) + " outside admissible interval (" +
                         std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  return {n, G, beta};
}

Matrix complete_graph(int n) {
  if (n < 1) throw InvalidNetwork("graph needs at least one node");
  return Matrix::Ones(n, n) - Matrix::Identity(n, n);
}

Matrix cycle_graph(int n) {
  if (n < 3) throw InvalidNetwork("cycle needs at least three nodes");
  Matrix g = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    g(i, (i + 1) % n) = 1.0;
    g((i + 1) % n, i) = 1.0;
  }
  return g;
}

Matrix star_graph(int n) {
  if (n < 2) throw InvalidNetwork("star needs at least two nodes");
  Matrix g = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) g(0, i) = g(i, 0) = 1.0;
  return g;
}

Environment network_environment(const NetworkSpec& net, const Matrix& V, const Matrix& W,
                                const Matrix& Z, std::optional<Vector> theta_mean) {
  const NetworkSpec checked = make_network(net.G, net.beta);
  const int n = checked.n;
  const Matrix Q = Matrix::Identity(n, n) - checked.beta * checked.G;
  return make_environment(Q, Matrix::Identity(n, n), V, W, Z,
                          theta_mean ? *theta_mean : Vector::Zero(n));
}

Environment welfare_environment(const Matrix& Q, const Matrix& R, const Matrix& Z,
                                const Vector& theta_mean, const Vector& weights) {
  const int n = static_cast<int>(Q.rows());
  if (weights.size() != n) throw DimensionMismatch("welfare weights must have length n");
  for (int i = 0; i < n; ++i)
    if (!(weights(i) > 0)) throw Error("welfare weights must be positive");
  Matrix V = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) V(i, i) = weights(i) * Q(i, i);
  return make_environment(Q, R, V, Matrix::Zero(n, R.cols()), Z, theta_mean);
}

Environment welfare_environment(const NetworkSpec& net, const Matrix& Z, const Vector& weights) {
  const NetworkSpec checked = make_network(net.G, net.beta);
  const int n = checked.n;
  const Matrix Q = Matrix::Identity(n, n) - checked.beta * checked.G;
  return welfare_environment(Q, Matrix::Identity(n, n), Z, Vector::Zero(n), weights);
}

SymMatrix common_state(int n) { return SymMatrix(Matrix::Ones(n, n)); }

SymMatrix equicorrelated_state(int n, double rho) {
  Matrix z = Matrix::Constant(n, n, rho);
  z.diagonal().setOnes();
  return SymMatrix(z);
}

std::optional<Vector> pdc_check(const Environment& env) {
  Vector delta = Vector::Zero(env.n);
  for (int i = 0; i < env.n; ++i) {
    const Vector r = env.R.row(i).transpose();
    const Vector w = env.W.row(i).transpose();
    const double rr = r.squaredNorm();
    if (rr == 0.0) {
      if (w.norm() > 1e-10) return std::nullopt;
      continue;
    }
    delta(i) = w.dot(r) / rr;
    if ((w - delta(i) * r).norm() > 1e-10 * (1.0 + w.norm())) return std::nullopt;
  }
  return delta;
}

Environment pdc_transform(const Environment& env) {
  const auto delta = pdc_check(env);
  if (!delta) throw PdcNotSatisfied("W is not a diagonal multiple of R");
  const Matrix dq = delta->asDiagonal() * env.Q;
  Environment out = env;
  out.V = SymMatrix(env.V.mat() + (dq + dq.transpose()) * 0.5);
  out.W = Matrix::Zero(env.n, env.m);
  return out;
}

bool is_personal_state(const Environment& env) {
  if (env.n != env.m) return false;
  if (env.R != Matrix::Identity(env.n, env.n)) return false;
  for (int i = 0; i < env.n; ++i)
    for (int j = 0; j < env.n; ++j)
      if (i != j && env.W(i, j) != 0.0) return false;
  return true;
}

Matrix response_map(const Environment& env) { return env.Q.partialPivLu().solve(env.R); }

Vector mean_actions(const Environment& env) { return response_map(env) * env.theta_mean; }

SymMatrix disclosure_objective(const Environment& env) {
  const Matrix f = response_map(env);
  const Matrix fw = f.transpose() * env.W;
  return SymMatrix(f.transpose() * env.V.mat() * f + (fw + fw.transpose()) * 0.5);
}

double full_disclosure_value(const Environment& env) { return inner(disclosure_objective(env), env.Z); }

double no_disclosure_value(const Environment&) { return 0.0; }

}  // namespace lqgid
