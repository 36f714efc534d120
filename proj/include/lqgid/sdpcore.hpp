#pragma once

#include "lqgid/matcore.hpp"

#include <string>
#include <vector>

namespace lqgid {

struct Constraint {
  SymMatrix A;
  double b = 0.0;
};

// max C • X  s.t.  A_i • X = b_i,  X psd.
// Dual: min b^T y  s.t.  S = sum_i y_i A_i - C psd.
struct CanonicalSDP {
  int order = 0;
  SymMatrix C;
  std::vector<Constraint> constraints;
};

enum class SolveStatus { Optimal, MaxIter, Infeasible, Unbounded };

std::string to_string(SolveStatus s);

struct SolveOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 50000;
};

struct SolveResiduals {
  double primal_eq = 0;       // ||A(X) - b|| / (1 + ||b||)
  double x_psd_violation = 0; // max(0, -lambda_min(X)) / scale
  double s_psd_violation = 0; // max(0, -lambda_min(S)) / scale
  double gap = 0;             // |pv - dv| / (1 + |pv|)
};

struct SDPSolution {
  SymMatrix X;
  Vector y;
  SymMatrix S;  // sum_i y_i A_i - C, recomputed from y
  double primal_value = 0;
  double dual_value = 0;
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  SolveResiduals residuals;
};

// 1 + ||C||_F + max_i ||A_i||_F.
double problem_scale(const CanonicalSDP& p);

SDPSolution solve(const CanonicalSDP& p, const SolveOptions& opts = {});

// X • S with S = sum_i y_i A_i - C.
double cs_product(const SDPSolution& sol, const CanonicalSDP& p);

// Residual record for an arbitrary (X, y) pair.
SolveResiduals evaluate(const CanonicalSDP& p, const SymMatrix& X, const Vector& y);

}  // namespace lqgid
