#pragma once

#include "lqgid/designsdp.hpp"
#include "lqgid/symmetry.hpp"

#include <optional>

namespace lqgid {

class NotTransitive : public Error {
 public:
  using Error::Error;
};

class NotCommonValue : public Error {
 public:
  using Error::Error;
};

class ParameterOutOfRange : public Error {
 public:
  using Error::Error;
};

class NewtonFailed : public Error {
 public:
  NewtonFailed(const std::string& what, double residual) : Error(what), residual(residual) {}
  double residual;
};

// Utilitarian welfare on a transitive network with a common state.
struct TransitiveWelfareSolution {
  bool full_disclosure_optimal = false;
  double cutoff = 0;  // in beta units; multiply by d for beta d(G) units
  double s = 0;       // 1 - Var[theta | sigma_i]
  double lambda = 0;
  double x = 0;       // Var[sigma_i]
  double y = 0;       // Cov[sigma_i, theta]
  double d = 0;
  double mu_min = 0;
  double value = 0;   // n x
};

// Checks transitivity against `group` when given, otherwise against the
// automorphism group of G (n <= 10).
TransitiveWelfareSolution transitive_welfare(const Matrix& G, double beta,
                                             const AutomorphismGroup* group = nullptr);
Environment transitive_welfare_environment(const Matrix& G, double beta);

enum class Regime { NoDisclosure, FullDisclosure, Partial };
std::string to_string(Regime r);

// Complete network, Q = I - beta K, V = v on the diagonal and c off it, W = O.
struct CompleteNetworkSolution {
  Regime regime = Regime::NoDisclosure;
  double x = 0, y = 0, rho_x = 0, rho_y = 0, lambda = 0;
  double s = 0;      // 1 - Var[theta_i | sigma_i] / Var[theta_i]
  double value = 0;  // V • X
  double residual = 0;  // max-abs residual of the five-equation system (private case)

  PrimalPoint point(int n) const;
};

Environment complete_environment(int n, double beta, double rho, double v, double c);

CompleteNetworkSolution complete_common(int n, double beta, double v, double c);

// The seed defaults to the root of the reduced one-dimensional obedience
// equation; pass another (e.g. read off an SDP solution) to start Newton there.
CompleteNetworkSolution complete_private(int n, double beta, double rho, double v, double c,
                                         const std::optional<CompleteNetworkSolution>& seed = std::nullopt);

// Read (x, y, rho_x, rho_y) off an invariant primal point.
CompleteNetworkSolution complete_from_point(const PrimalPoint& point, double lambda);

struct PublicDesignSolution {
  int k_star = 0;
  double value = 0;
  SymMatrix S;           // Var[E[theta | eta]]
  Matrix signal_map;     // k* x m, eta = signal_map theta
  Vector gamma;          // eigenvalues of Z^{1/2} Cbar Z^{1/2}, non-increasing
  Matrix U;              // matching eigenvectors
  SymMatrix C_hat;
  int p_objective = 0;   // strictly positive eigenvalues of [[V, W/2], [W^T/2, O]]
  bool k_star_bound_holds = false;
};

PublicDesignSolution public_design(const Environment& env);

struct PublicGlobalTest {
  bool verdict = false;
  Vector lambda;
  double residual = 0;  // ||equations|| / (1 + ||constant part||)
  double a_lambda_min = 0;
};

PublicGlobalTest public_globally_optimal(const Environment& env, const PublicDesignSolution& sol);

// max C_hat • S  s.t.  I - S >= 0, S >= 0, written over [[S, *], [*, I - S]].
CanonicalSDP public_lifted_sdp(const SymMatrix& C_hat);

}  // namespace lqgid
