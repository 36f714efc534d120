#include "lqgid/designsdp.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace lqgid {

namespace {

// Design program for a state with covariance z and loadings r, w.
CanonicalSDP assemble_primal(const Environment& env, const Matrix& r, const Matrix& w, const Matrix& z) {
  const int n = env.n;
  const int m = static_cast<int>(r.cols());
  const int d = n + m;
  CanonicalSDP p;
  p.order = d;
  Matrix c = Matrix::Zero(d, d);
  c.topLeftCorner(n, n) = env.V.mat();
  c.topRightCorner(n, m) = w * 0.5;
  c.bottomLeftCorner(m, n) = w.transpose() * 0.5;
  p.C = SymMatrix(c);

  for (int i = 0; i < n; ++i) {
    Matrix phi = Matrix::Zero(d, d);
    for (int j = 0; j < n; ++j) {
      phi(i, j) += env.Q(i, j) * 0.5;
      phi(j, i) += env.Q(i, j) * 0.5;
    }
    for (int k = 0; k < m; ++k) {
      phi(i, n + k) -= r(i, k) * 0.5;
      phi(n + k, i) -= r(i, k) * 0.5;
    }
    p.constraints.push_back({SymMatrix(phi), 0.0});
  }
  for (int k = 0; k < m; ++k) {
    for (int l = k; l < m; ++l) {
      Matrix psi = Matrix::Zero(d, d);
      psi(n + k, n + l) += 0.5;
      psi(n + l, n + k) += 0.5;
      p.constraints.push_back({SymMatrix(psi), z(k, l)});
    }
  }
  return p;
}

// Z = L L^T with L of full column rank.
Matrix state_factor(const SymMatrix& z) {
  const EigenDecomposition e = eig_sym(z);
  const double cut = rank_cut(std::abs(e.values(0)));
  int r = 0;
  while (r < e.values.size() && e.values(r) > cut) ++r;
  Matrix l(z.order(), r);
  for (int k = 0; k < r; ++k) l.col(k) = e.vectors.col(k) * std::sqrt(e.values(k));
  return l;
}

// Minimize ||E0 + sum_i lambda_i E_i||_F over lambda.
Vector least_squares(const Matrix& e0, const std::vector<Matrix>& ei, double& residual) {
  const int n = static_cast<int>(ei.size());
  const Eigen::Index len = e0.size();
  Matrix a(len, n);
  for (int i = 0; i < n; ++i) a.col(i) = Eigen::Map<const Vector>(ei[i].data(), len);
  const Vector rhs = -Eigen::Map<const Vector>(e0.data(), len);
  const Vector lambda = pinv(a, 1e-12) * rhs;
  residual = (a * lambda - rhs).norm();
  return lambda;
}

}  // namespace

CanonicalSDP build_primal(const Environment& env) { return assemble_primal(env, env.R, env.W, env.Z); }

double value(const Environment& env, const PrimalPoint& point) {
  return inner(env.V, point.X) + inner(env.W, point.Y);
}

SymMatrix stack(const Environment& env, const PrimalPoint& point) {
  const int n = env.n, m = env.m;
  Matrix mm(n + m, n + m);
  mm.topLeftCorner(n, n) = point.X.mat();
  mm.topRightCorner(n, m) = point.Y;
  mm.bottomLeftCorner(m, n) = point.Y.transpose();
  mm.bottomRightCorner(m, m) = env.Z.mat();
  return SymMatrix(mm);
}

FeasibilityResiduals primal_residuals(const Environment& env, const PrimalPoint& point) {
  if (point.X.order() != env.n || point.Y.rows() != env.n || point.Y.cols() != env.m)
    throw DimensionMismatch("primal point does not match environment");
  const Vector lhs = (point.X.mat() * env.Q.transpose()).diagonal();
  const Vector rhs = (point.Y * env.R.transpose()).diagonal();
  return {(lhs - rhs).cwiseAbs().maxCoeff(), is_psd(stack(env, point), 0).lambda_min};
}

bool is_primal_feasible(const Environment& env, const PrimalPoint& point, double tol) {
  const FeasibilityResiduals r = primal_residuals(env, point);
  const double scale = 1.0 + norm2(stack(env, point));
  return r.obedience <= tol * scale && r.psd_min >= -tol * scale;
}

PrimalPoint no_disclosure_point(const Environment& env) {
  return {SymMatrix::zero(env.n), Matrix::Zero(env.n, env.m)};
}

PrimalPoint full_disclosure_point(const Environment& env) {
  const Matrix f = response_map(env);
  const Matrix y = f * env.Z.mat();
  return {SymMatrix(y * f.transpose()), y};
}

DualCertificate certificate(const Environment& env, const Vector& lambda, double tol) {
  if (lambda.size() != env.n) throw DimensionMismatch("certificate: lambda must have length n");
  DualCertificate cert;
  cert.lambda = lambda;
  const Matrix lq = lambda.asDiagonal() * env.Q;
  cert.A = SymMatrix((lq + lq.transpose()) * 0.5 - env.V.mat());
  cert.B = (lambda.asDiagonal() * env.R + env.W) * 0.5;
  cert.C = SymMatrix(cert.B.transpose() * pinv_sym(cert.A).mat() * cert.B);
  // [[A, -B], [-B^T, Gamma]] is only tested on the support of Z: with a
  // singular Z the infimum over Gamma is not attained, while the same bound
  // is attained once B is restricted to B L, Z = L L^T.
  const Matrix l = state_factor(env.Z);
  if (l.cols() == env.m) {
    cert.feasible = block_psd(cert.A, -cert.B, cert.C, tol);
  } else {
    const Matrix bl = cert.B * l;
    cert.feasible = block_psd(cert.A, -bl, SymMatrix(l.transpose() * cert.C.mat() * l), tol);
  }
  cert.dual_value = inner(env.Z, cert.C);
  return cert;
}

OptimalityReport verify_optimality(const Environment& env, const PrimalPoint& point,
                                   const DualCertificate& cert, double tol) {
  OptimalityReport r;
  r.cs1_residual = (cert.A.mat() * point.X.mat() - cert.B * point.Y.transpose()).norm();
  r.cs2_residual = (cert.A.mat() * point.Y - cert.B * env.Z.mat()).norm();
  r.scale = 1.0 + cert.A.mat().norm() + cert.B.norm();
  r.gap = std::abs(value(env, point) - cert.dual_value);
  r.verdict = cert.feasible && r.cs1_residual <= tol * r.scale && r.cs2_residual <= tol * r.scale;
  return r;
}

DesignSolution solve_design(const Environment& env, const DesignOptions& opts) {
  // Solve in whitened state coordinates theta = theta_mean + L xi with
  // Var[xi] = I_r; Cov[a, theta] = Cov[a, xi] L^T. This keeps the pinned
  // block nonsingular when Z is rank deficient.
  const Matrix l = state_factor(env.Z);
  const int r = static_cast<int>(l.cols());
  CanonicalSDP p = assemble_primal(env, env.R * l, env.W * l, Matrix::Identity(r, r));

  // Balance the action block against the unit state block by the
  // full-disclosure magnitude: M = D M' D leaves the multipliers unchanged.
  const Matrix f = response_map(env) * l;
  const double s = std::sqrt(std::max(1e-12, (f * f.transpose()).diagonal().maxCoeff()));
  Vector dvec = Vector::Ones(env.n + r);
  dvec.head(env.n).setConstant(s);
  const auto congruence = [&](const SymMatrix& a) { return SymMatrix(dvec.asDiagonal() * a.mat() * dvec.asDiagonal()); };
  p.C = congruence(p.C);
  for (auto& c : p.constraints) c.A = congruence(c.A);

  SDPSolution sol = solve(p, opts.sdp);
  sol.X = congruence(sol.X);
  if (sol.status != SolveStatus::Optimal) {
    throw SolverFailed("design SDP not solved: " + to_string(sol.status) + " after " +
                           std::to_string(sol.iterations) + " iterations (primal residual " +
                           std::to_string(sol.residuals.primal_eq) + ", gap " +
                           std::to_string(sol.residuals.gap) + ")",
                       sol.status, sol.residuals);
  }

  const int n = env.n;
  DesignSolution out;
  out.point.X = SymMatrix(sol.X.mat().topLeftCorner(n, n));
  out.point.Y = sol.X.mat().topRightCorner(n, r) * l.transpose();
  out.v_p = value(env, out.point);
  out.v_d = sol.dual_value;
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.sdp_residuals = sol.residuals;
  out.cert = certificate(env, sol.y.head(n), opts.psd_tol);
  out.report = verify_optimality(env, out.point, out.cert, opts.cs_tol);
  return out;
}

NoDisclosureTest test_no_disclosure(const Environment& env, bool allow_search) {
  NoDisclosureTest out;
  const auto delta = pdc_check(env);
  bool closed = false;
  if (delta) {
    const Vector rzr = (env.R * env.Z.mat() * env.R.transpose()).diagonal();
    closed = (rzr.array() > 1e-12 * (1.0 + rzr.cwiseAbs().maxCoeff())).all();
  }
  if (closed) {
    // With W = Delta R, B_Lambda Z B_Lambda^T = O forces Lambda = -Delta and
    // the certificate reduces to A = -Vtilde.
    const SymMatrix vt = pdc_transform(env).V;
    const Vector ev = eig_sym(vt).values;
    out.closed_form = true;
    out.lambda = -*delta;
    out.optimal = ev(0) <= 1e-9 * (1.0 + norm2(vt));
    out.unique = ev(0) < -1e-8;
    out.residual = 0;
    return out;
  }
  if (!allow_search) throw ClosedFormUnavailable("no closed-form no-disclosure test applies");

  // B_Lambda Z^{1/2} = O separates over agents.
  const Matrix zh = sqrt_psd(env.Z).mat();
  out.lambda = Vector::Zero(env.n);
  for (int i = 0; i < env.n; ++i) {
    const Vector rz = zh * env.R.row(i).transpose();
    const Vector wz = zh * env.W.row(i).transpose();
    const double rr = rz.squaredNorm();
    if (rr > 1e-24) out.lambda(i) = -rz.dot(wz) / rr;
  }
  out.residual = ((out.lambda.asDiagonal() * env.R + env.W) * zh).norm();
  const DualCertificate cert = certificate(env, out.lambda);
  out.optimal = cert.feasible && out.residual <= 1e-8 * (1.0 + env.W.norm());
  out.unique = out.optimal && eig_sym(cert.A).values(env.n - 1) > 1e-8;
  return out;
}

FullDisclosureTest test_full_disclosure(const Environment& env) {
  FullDisclosureTest out;
  const int n = env.n;
  const Vector zev = eig_sym(env.Z).values;
  const bool z_definite = zev(env.m - 1) > rank_cut(zev(0));
  if (z_definite && is_personal_state(env)) {
    const SymMatrix vt = pdc_transform(env).V;
    const Vector dv = vt.mat().diagonal();
    if ((dv.array() > 0).all()) {
      const Vector dq = env.Q.diagonal();
      const Matrix lhs = dv.cwiseInverse().asDiagonal() * vt.mat();
      const Matrix rhs = dq.cwiseInverse().asDiagonal() * env.Q;
      out.closed_form = true;
      out.residual = (lhs - rhs).cwiseAbs().maxCoeff();
      out.optimal = is_psd(vt, 1e-9).psd && out.residual <= 1e-10 * (1.0 + rhs.cwiseAbs().maxCoeff());
      // Lambda for the transformed objective is 2 D_V D_Q^{-1}; undo the shift by Delta.
      Vector lam = 2.0 * dv.cwiseQuotient(dq) - env.W.diagonal();
      out.lambda = lam;
      return out;
    }
  }

  // (A_Lambda Q^{-1} R - B_Lambda) Z^{1/2} = O is affine in lambda.
  const Matrix f = response_map(env);
  const Matrix zh = sqrt_psd(env.Z).mat();
  const Matrix e0 = (-env.V.mat() * f - env.W * 0.5) * zh;
  std::vector<Matrix> ei(n);
  for (int i = 0; i < n; ++i) {
    Matrix ea = Matrix::Zero(n, n);
    ea.row(i) = env.Q.row(i) * 0.5;
    const Matrix a = ea + ea.transpose();
    Matrix eb = Matrix::Zero(n, env.m);
    eb.row(i) = env.R.row(i) * 0.5;
    ei[i] = (a * f - eb) * zh;
  }
  double residual = 0;
  const Vector lambda = least_squares(e0, ei, residual);
  out.residual = residual;
  out.lambda = lambda;
  const DualCertificate cert = certificate(env, lambda);
  out.optimal = cert.feasible && residual <= 1e-8 * (1.0 + e0.norm());
  return out;
}

}  // namespace lqgid
