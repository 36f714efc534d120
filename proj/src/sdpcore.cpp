#include "lqgid/sdpcore.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lqgid {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

double problem_scale(const CanonicalSDP& p) {
  double amax = 0.0;
  for (const auto& c : p.constraints) amax = std::max(amax, c.A.mat().norm());
  return 1.0 + p.C.mat().norm() + amax;
}

namespace {

void validate(const CanonicalSDP& p) {
  if (p.order < 1) throw DimensionMismatch("sdp: order must be positive");
  if (p.C.order() != p.order) throw DimensionMismatch("sdp: objective has wrong order");
  if (p.constraints.empty()) throw Error("sdp: at least one constraint is required");
  for (const auto& c : p.constraints) {
    if (c.A.order() != p.order) throw DimensionMismatch("sdp: constraint has wrong order");
    if (!std::isfinite(c.b)) throw NonFiniteInput("sdp: non-finite right-hand side");
  }
}

Vector apply_a(const std::vector<Matrix>& a, const Matrix& x) {
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out(i) = a[i].cwiseProduct(x).sum();
  return out;
}

Matrix apply_at(const std::vector<Matrix>& a, const Vector& y) {
  Matrix out = Matrix::Zero(a[0].rows(), a[0].cols());
  for (size_t i = 0; i < a.size(); ++i) out += y(i) * a[i];
  return out;
}

// Largest step t with X + t dX psd (infinity if unrestricted).
double max_step(const Eigen::LLT<Matrix>& chol, const Matrix& dx) {
  const Matrix l = chol.matrixL();
  const Matrix half = l.triangularView<Eigen::Lower>().solve(dx);
  const Matrix w = l.triangularView<Eigen::Lower>().solve(half.transpose());
  const Vector ev = eig_sym(SymMatrix(w)).values;
  const double lmin = ev(ev.size() - 1);
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double lambda_min(const Matrix& m) {
  const Vector ev = eig_sym(SymMatrix(m)).values;
  return ev(ev.size() - 1);
}

struct Iterate {
  Matrix X;
  Vector y;
  Matrix S;
};

// Upper-triangle coordinates of a symmetric matrix.
struct SymIndex {
  explicit SymIndex(int n) : n(n) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) pairs.push_back({i, j});
  }
  int size() const { return static_cast<int>(pairs.size()); }
  Vector svec(const Matrix& m) const {
    Vector v(size());
    for (int t = 0; t < size(); ++t) v(t) = m(pairs[t].first, pairs[t].second);
    return v;
  }
  Matrix basis(int t) const {
    Matrix e = Matrix::Zero(n, n);
    e(pairs[t].first, pairs[t].second) = 1.0;
    e(pairs[t].second, pairs[t].first) = 1.0;
    return e;
  }
  int n;
  std::vector<std::pair<int, int>> pairs;
};

struct KktResidual {
  Vector rp;   // A(X) - b
  Matrix rd;   // sum y A - C - S
  Matrix rc;   // (XS + SX)/2
  double merit;
};

KktResidual kkt_residual(const std::vector<Matrix>& a, const Vector& b, const Matrix& c, const Iterate& z) {
  KktResidual r;
  r.rp = apply_a(a, z.X) - b;
  r.rd = apply_at(a, z.y) - c - z.S;
  r.rc = (z.X * z.S + z.S * z.X) * 0.5;
  const double xs = (1.0 + z.X.norm()) * (1.0 + z.S.norm());
  r.merit = std::max({r.rp.norm() / (1.0 + b.norm()), r.rd.norm() / (1.0 + c.norm()), r.rc.norm() / xs});
  return r;
}

// Newton steps on the symmetrized optimality system
//   A(X) = b,  sum y A - S = C,  XS + SX = 0,
// solved densely in least-squares form. Steps are kept only when they reduce
// the residual and leave X and S psd up to rounding.
void polish(const std::vector<Matrix>& a, const Vector& b, const Matrix& c, Iterate& z) {
  const int n = static_cast<int>(c.rows());
  const int k = static_cast<int>(a.size());
  const SymIndex idx(n);
  const int t = idx.size();
  KktResidual cur = kkt_residual(a, b, c, z);
  for (int round = 0; round < 8 && cur.merit > 1e-16; ++round) {
    Matrix jac = Matrix::Zero(k + 2 * t, 2 * t + k);
    for (int q = 0; q < t; ++q) {
      const Matrix e = idx.basis(q);
      for (int l = 0; l < k; ++l) jac(l, q) = a[l].cwiseProduct(e).sum();
      jac.block(k + t, q, t, 1) = idx.svec((e * z.S + z.S * e) * 0.5);
      jac.block(k, t + k + q, t, 1) = -idx.svec(e);
      jac.block(k + t, t + k + q, t, 1) = idx.svec((z.X * e + e * z.X) * 0.5);
    }
    for (int l = 0; l < k; ++l) jac.block(k, t + l, t, 1) = idx.svec(a[l]);
    Vector rhs(k + 2 * t);
    rhs << -cur.rp, -idx.svec(cur.rd), -idx.svec(cur.rc);
    const Vector step = jac.completeOrthogonalDecomposition().solve(rhs);
    if (!step.allFinite()) return;

    Matrix dx = Matrix::Zero(n, n), ds = Matrix::Zero(n, n);
    for (int q = 0; q < t; ++q) {
      const auto [i, j] = idx.pairs[q];
      dx(i, j) = dx(j, i) = step(q);
      ds(i, j) = ds(j, i) = step(t + k + q);
    }
    bool accepted = false;
    for (double alpha = 1.0; alpha >= 0.125; alpha *= 0.5) {
      Iterate trial{z.X + alpha * dx, z.y + alpha * step.segment(t, k), z.S + alpha * ds};
      const KktResidual tr = kkt_residual(a, b, c, trial);
      const double lx = lambda_min(trial.X), ls = lambda_min(trial.S);
      const double floor = 1e-12;
      if (tr.merit < cur.merit && lx >= -floor * (1.0 + trial.X.norm()) && ls >= -floor * (1.0 + trial.S.norm())) {
        z = std::move(trial);
        cur = tr;
        accepted = true;
        break;
      }
    }
    if (!accepted) return;
  }
}

}  // namespace

SolveResiduals evaluate(const CanonicalSDP& p, const SymMatrix& X, const Vector& y) {
  const double scale = problem_scale(p);
  Vector b(p.constraints.size()), ax(p.constraints.size());
  Matrix s = -p.C.mat();
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    b(i) = p.constraints[i].b;
    ax(i) = inner(p.constraints[i].A, X);
    s += y(i) * p.constraints[i].A.mat();
  }
  SolveResiduals r;
  r.primal_eq = (ax - b).norm() / (1.0 + b.norm());
  r.x_psd_violation = std::max(0.0, -lambda_min(X)) / scale;
  r.s_psd_violation = std::max(0.0, -lambda_min(s)) / scale;
  const double pv = inner(p.C, X);
  const double dv = b.dot(y);
  r.gap = std::abs(pv - dv) / (1.0 + std::abs(pv));
  return r;
}

double cs_product(const SDPSolution& sol, const CanonicalSDP& p) {
  Matrix s = -p.C.mat();
  for (size_t i = 0; i < p.constraints.size(); ++i) s += sol.y(i) * p.constraints[i].A.mat();
  return inner(sol.X, s);
}

SDPSolution solve(const CanonicalSDP& p, const SolveOptions& opts) {
  validate(p);
  const int n = p.order;
  const int k = static_cast<int>(p.constraints.size());

  // Work on a normalized copy: rows of the constraint map have unit norm and
  // the objective has norm at most one.
  std::vector<Matrix> a(k);
  Vector b(k), row_scale(k);
  for (int i = 0; i < k; ++i) {
    const double nrm = p.constraints[i].A.mat().norm();
    row_scale(i) = nrm > 0 ? nrm : 1.0;
    a[i] = p.constraints[i].A.mat() / row_scale(i);
    b(i) = p.constraints[i].b / row_scale(i);
  }
  const double c_scale = std::max(1.0, p.C.mat().norm());
  const Matrix c = p.C.mat() / c_scale;

  double amax = 0.0;
  for (int i = 0; i < k; ++i) amax = std::max(amax, (1.0 + std::abs(b(i))) / (1.0 + a[i].norm()));
  const double xi = std::max({10.0, std::sqrt(double(n)), n * amax});
  const double eta = std::max({10.0, std::sqrt(double(n)), 1.0 + c.norm()});

  Matrix X = xi * Matrix::Identity(n, n);
  Matrix S = eta * Matrix::Identity(n, n);
  Vector y = Vector::Zero(k);

  const double target = std::max(1e-15, 1e-6 * std::min(opts.gap_tol, opts.feas_tol));
  const int iter_cap = std::min(opts.max_iter, 250);

  Iterate best{X, y, S};
  double best_merit = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::MaxIter;
  double gamma = 0.9;
  int stalls = 0;
  int it = 0;

  for (; it < iter_cap; ++it) {
    const Vector rp = b - apply_a(a, X);
    const Matrix rd = apply_at(a, y) - c - S;
    const double pv = c.cwiseProduct(X).sum();
    const double dv = b.dot(y);
    const double mu = X.cwiseProduct(S).sum() / n;
    const double pr = rp.norm() / (1.0 + b.norm());
    const double dr = rd.norm() / (1.0 + c.norm());
    const double gap = std::abs(pv - dv) / (1.0 + std::abs(pv) + std::abs(dv));
    const double merit = std::max({pr, dr, gap, std::abs(mu) / (1.0 + std::abs(pv))});
    if (merit < best_merit) {
      best_merit = merit;
      best = {X, y, S};
    }
    if (merit <= target) break;
    if (dv < -1e9 && dr < 1e-6) {
      status = SolveStatus::Infeasible;
      break;
    }
    if (pv > 1e9 && pr < 1e-6) {
      status = SolveStatus::Unbounded;
      break;
    }

    Eigen::LLT<Matrix> cx(X), cs(S);
    if (cx.info() != Eigen::Success || cs.info() != Eigen::Success) break;
    const Matrix s_inv = cs.solve(Matrix::Identity(n, n));

    // Schur complement M_ij = tr(A_i X A_j S^-1).
    std::vector<Matrix> t(k);
    Matrix schur(k, k);
    for (int j = 0; j < k; ++j) t[j] = X * a[j] * s_inv;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) schur(i, j) = a[i].cwiseProduct(t[j].transpose()).sum();
    schur = ((schur + schur.transpose()) * 0.5).eval();
    Eigen::LDLT<Matrix> fact(schur);
    if (fact.info() != Eigen::Success) break;

    Vector tr_sinv(k);
    for (int i = 0; i < k; ++i) tr_sinv(i) = a[i].cwiseProduct(s_inv).sum();
    const Matrix xrd = X * rd;

    auto direction = [&](double sigma_mu, const Matrix& corr, Matrix& dx, Vector& dy, Matrix& ds) {
      const Matrix g = (xrd + corr) * s_inv;
      Vector rhs(k);
      for (int i = 0; i < k; ++i) rhs(i) = sigma_mu * tr_sinv(i) - b(i) - a[i].cwiseProduct(g.transpose()).sum();
      dy = fact.solve(rhs);
      ds = apply_at(a, dy) + rd;
      dx = sigma_mu * s_inv - X - (X * ds + corr) * s_inv;
      dx = ((dx + dx.transpose()) * 0.5).eval();
    };

    Matrix dx, ds;
    Vector dy;
    const Matrix zero = Matrix::Zero(n, n);
    direction(0.0, zero, dx, dy, ds);
    const double ap = std::min(1.0, max_step(cx, dx));
    const double ad = std::min(1.0, max_step(cs, ds));
    const double mu_aff = (X + ap * dx).cwiseProduct(S + ad * ds).sum() / n;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    const Matrix corr = dx * ds;
    direction(sigma * mu, corr, dx, dy, ds);
    const double step_p = std::min(1.0, gamma * max_step(cx, dx));
    const double step_d = std::min(1.0, gamma * max_step(cs, ds));
    if (!std::isfinite(step_p) || !std::isfinite(step_d) || !dx.allFinite() || !ds.allFinite()) break;

    X += step_p * dx;
    X = ((X + X.transpose()) * 0.5).eval();
    y += step_d * dy;
    S += step_d * ds;
    S = ((S + S.transpose()) * 0.5).eval();
    gamma = 0.9 + 0.09 * std::min(step_p, step_d);

    stalls = (std::max(step_p, step_d) < 1e-8) ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }

  if (status == SolveStatus::MaxIter) polish(a, b, c, best);

  SDPSolution sol;
  sol.iterations = it;
  sol.X = SymMatrix(best.X);
  sol.y = Vector(k);
  for (int i = 0; i < k; ++i) sol.y(i) = best.y(i) * c_scale / row_scale(i);
  Matrix s_exact = -p.C.mat();
  for (int i = 0; i < k; ++i) s_exact += sol.y(i) * p.constraints[i].A.mat();
  sol.S = SymMatrix(s_exact);
  sol.primal_value = inner(p.C, sol.X);
  sol.dual_value = 0.0;
  for (int i = 0; i < k; ++i) sol.dual_value += p.constraints[i].b * sol.y(i);
  sol.residuals = evaluate(p, sol.X, sol.y);
  if (status == SolveStatus::MaxIter) {
    const auto& r = sol.residuals;
    if (r.primal_eq <= opts.feas_tol && r.x_psd_violation <= opts.feas_tol &&
        r.s_psd_violation <= opts.feas_tol && r.gap <= opts.gap_tol)
      status = SolveStatus::Optimal;
  }
  sol.status = status;
  return sol;
}

}  // namespace lqgid
