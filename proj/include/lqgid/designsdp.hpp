#pragma once

#include "lqgid/envmodel.hpp"
#include "lqgid/sdpcore.hpp"

#include <optional>

namespace lqgid {

class SolverFailed : public Error {
 public:
  SolverFailed(const std::string& what, SolveStatus status, SolveResiduals residuals)
      : Error(what), status(status), residuals(residuals) {}
  SolveStatus status;
  SolveResiduals residuals;
};

class ClosedFormUnavailable : public Error {
 public:
  using Error::Error;
};

// X = Var[a], Y = Cov[a, theta].
struct PrimalPoint {
  SymMatrix X;
  Matrix Y;
};

struct DualCertificate {
  Vector lambda;
  SymMatrix A;  // (Lambda Q + Q^T Lambda)/2 - V
  Matrix B;     // (Lambda R + W)/2
  SymMatrix C;  // B^T A^+ B
  bool feasible = false;
  double dual_value = 0;  // Z • C
};

struct OptimalityReport {
  double cs1_residual = 0;  // ||A X - B Y^T||_F
  double cs2_residual = 0;  // ||A Y - B Z||_F
  double scale = 1;         // 1 + ||A||_F + ||B||_F
  double gap = 0;           // |value(point) - dual_value|
  bool verdict = false;
};

struct DesignOptions {
  SolveOptions sdp;
  double cs_tol = 1e-6;
  double psd_tol = 1e-9;
};

struct DesignSolution {
  PrimalPoint point;
  DualCertificate cert;
  OptimalityReport report;
  double v_p = 0;
  double v_d = 0;  // b^T y reported by the solver
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  SolveResiduals sdp_residuals;
};

struct FeasibilityResiduals {
  double obedience = 0;  // ||diag(X Q^T) - diag(Y R^T)||_inf
  double psd_min = 0;    // lambda_min of [[X, Y], [Y^T, Z]]
};

// Objective [[V, W/2], [W^T/2, O]], obedience rows Phi_i and the pinning
// rows Psi_kk' (k <= k') over M in S^{n+m}.
CanonicalSDP build_primal(const Environment& env);

DesignSolution solve_design(const Environment& env, const DesignOptions& opts = {});

DualCertificate certificate(const Environment& env, const Vector& lambda, double tol = 1e-9);

OptimalityReport verify_optimality(const Environment& env, const PrimalPoint& point,
                                   const DualCertificate& cert, double tol = 1e-6);

double value(const Environment& env, const PrimalPoint& point);

SymMatrix stack(const Environment& env, const PrimalPoint& point);
FeasibilityResiduals primal_residuals(const Environment& env, const PrimalPoint& point);
bool is_primal_feasible(const Environment& env, const PrimalPoint& point, double tol = 1e-8);

PrimalPoint no_disclosure_point(const Environment& env);
PrimalPoint full_disclosure_point(const Environment& env);

struct NoDisclosureTest {
  bool optimal = false;
  bool unique = false;
  Vector lambda;
  double residual = 0;
  bool closed_form = false;
};

struct FullDisclosureTest {
  bool optimal = false;
  std::optional<Vector> lambda;
  double residual = 0;
  bool closed_form = false;
};

NoDisclosureTest test_no_disclosure(const Environment& env, bool allow_search = true);
FullDisclosureTest test_full_disclosure(const Environment& env);

}  // namespace lqgid
