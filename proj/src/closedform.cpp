#include "lqgid/closedform.hpp"

#include <array>
#include <cmath>

namespace lqgid {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::NoDisclosure: return "NoDisclosure";
    case Regime::FullDisclosure: return "FullDisclosure";
    case Regime::Partial: return "Partial";
  }
  return "?";
}

Environment transitive_welfare_environment(const Matrix& G, double beta) {
  const NetworkSpec net = make_network(G, beta);
  return welfare_environment(net, common_state(net.n), Vector::Ones(net.n));
}

TransitiveWelfareSolution transitive_welfare(const Matrix& G, double beta, const AutomorphismGroup* group) {
  const NetworkSpec net = make_network(G, beta);
  if (group) {
    if (group->n() != net.n) throw DimensionMismatch("group degree differs from network size");
    for (const auto& p : group->permutations())
      if (!preserves(G, p)) throw InvalidGroup("group element is not an automorphism of G");
    if (!is_transitive(*group)) throw NotTransitive("network is not transitive");
  } else if (!is_transitive(automorphisms(G))) {
    throw NotTransitive("network is not transitive");
  }
  const DegreeProfile prof = degree_profile(G);
  const double d = *prof.d;  // transitive implies regular
  const double mu = eig_sym(SymMatrix(G)).values(net.n - 1);

  TransitiveWelfareSolution out;
  out.d = d;
  out.mu_min = mu;
  out.cutoff = -1.0 / (d - 2.0 * mu);
  out.full_disclosure_optimal = beta >= out.cutoff;
  if (out.full_disclosure_optimal) {
    out.lambda = 2.0 / (1.0 - beta * d);
    out.s = 1.0;
  } else {
    out.lambda = 1.0 / (1.0 - beta * mu);
    out.s = (1.0 / std::abs(beta) + mu) / (d - mu);
  }
  out.y = out.lambda / (2.0 * out.lambda * (1.0 - beta * d) - 2.0);
  out.x = out.lambda * out.y / 2.0;
  out.value = net.n * out.x;
  return out;
}

namespace {

struct CompleteSpectrum {
  // index 0: the (n-1)-fold eigenvalue orthogonal to 1, index 1: along 1
  std::array<double, 2> q, p, z;
  std::array<double, 2> w;  // weights turning eigenvalues into a diagonal entry
  int n;
};

CompleteSpectrum spectrum(int n, double beta, double rho, double v, double c) {
  CompleteSpectrum s;
  s.n = n;
  s.q = {1.0 + beta, 1.0 - (n - 1) * beta};
  s.p = {v - c, v + (n - 1) * c};
  s.z = {1.0 - rho, 1.0 + (n - 1) * rho};
  s.w = {(n - 1.0) / n, 1.0 / n};
  return s;
}

void check_complete(int n, double beta) {
  if (n < 2) throw ParameterOutOfRange("complete network needs n >= 2");
  if (!(beta > -1.0 && beta < 1.0 / (n - 1))) throw ParameterOutOfRange("beta outside (-1, 1/(n-1))");
}

bool no_disclosure_region(int n, double v, double c) { return v <= c && c <= -v / (n - 1); }

// Diagonal and off-diagonal entries of the invariant matrix with the given eigenvalues.
std::pair<double, double> entries(const CompleteSpectrum& s, double e0, double e1) {
  return {s.w[0] * e0 + s.w[1] * e1, (e1 - e0) / s.n};
}

// The five-equation system in (x, y, rho_x, rho_y, lambda) and its Jacobian.
struct FiveSystem {
  int n;
  double beta, rho;
  CompleteSpectrum sp;

  void coefficients(double lambda, double& a, double& b, double& da, double& db) const {
    const double a0 = sp.q[0] * lambda - sp.p[0], a1 = sp.q[1] * lambda - sp.p[1];
    const double i0 = 1.0 / a0, i1 = 1.0 / a1;
    const double di0 = -sp.q[0] * i0 * i0, di1 = -sp.q[1] * i1 * i1;
    a = lambda / (2.0 * n) * ((n - 1) * i0 + i1);
    b = lambda / (2.0 * n) * (i1 - i0);
    da = ((n - 1) * i0 + i1) / (2.0 * n) + lambda / (2.0 * n) * ((n - 1) * di0 + di1);
    db = (i1 - i0) / (2.0 * n) + lambda / (2.0 * n) * (di1 - di0);
  }

  Vector residual(const Vector& u, Matrix* jac = nullptr) const {
    const double x = u(0), y = u(1), rx = u(2), ry = u(3), lam = u(4);
    double a, b, da, db;
    coefficients(lam, a, b, da, db);
    const double k = n - 1.0;
    Vector f(5);
    f(0) = x - a * y - b * k * ry * y;
    f(1) = rx * x - a * ry * y - b * (y + (n - 2) * ry * y);
    f(2) = y - a - b * k * rho;
    f(3) = ry * y - a * rho - b * (1.0 + (n - 2) * rho);
    f(4) = x - y - k * beta * rx * x;
    if (jac) {
      Matrix& j = *jac;
      j.setZero(5, 5);
      j(0, 0) = 1;
      j(0, 1) = -a - b * k * ry;
      j(0, 3) = -b * k * y;
      j(0, 4) = -da * y - db * k * ry * y;
      j(1, 0) = rx;
      j(1, 1) = -a * ry - b * (1.0 + (n - 2) * ry);
      j(1, 2) = x;
      j(1, 3) = -a * y - b * (n - 2) * y;
      j(1, 4) = -da * ry * y - db * (y + (n - 2) * ry * y);
      j(2, 1) = 1;
      j(2, 4) = -da - db * k * rho;
      j(3, 1) = ry;
      j(3, 3) = y;
      j(3, 4) = -da * rho - db * (1.0 + (n - 2) * rho);
      j(4, 0) = 1.0 - k * beta * rx;
      j(4, 1) = -1;
      j(4, 2) = -k * beta * x;
    }
    return f;
  }
};

// Obedience reduced to lambda: sum_k w_k z_k (p_k - u_k) / u_k^2 with
// u_k = q_k lambda - p_k, on lambda > max_k p_k / q_k.
double reduced_obedience(const CompleteSpectrum& s, double lambda) {
  double g = 0;
  for (int k = 0; k < 2; ++k) {
    const double u = s.q[k] * lambda - s.p[k];
    g += s.w[k] * s.z[k] * (s.p[k] - u) / (u * u);
  }
  return g;
}

CompleteNetworkSolution from_lambda(const CompleteSpectrum& s, double lambda) {
  std::array<double, 2> h, yv, xv;
  for (int k = 0; k < 2; ++k) {
    h[k] = lambda / (2.0 * (s.q[k] * lambda - s.p[k]));
    yv[k] = h[k] * s.z[k];
    xv[k] = h[k] * h[k] * s.z[k];
  }
  const auto [yd, yo] = entries(s, yv[0], yv[1]);
  const auto [xd, xo] = entries(s, xv[0], xv[1]);
  CompleteNetworkSolution out;
  out.x = xd;
  out.y = yd;
  out.rho_x = xd != 0 ? xo / xd : 0.0;
  out.rho_y = yd != 0 ? yo / yd : 0.0;
  out.lambda = lambda;
  return out;
}

void finish(CompleteNetworkSolution& out, int n, double v, double c) {
  out.s = out.x > 0 ? out.y * out.y / out.x : 0.0;
  out.value = n * out.x * (v + (n - 1) * c * out.rho_x);
}

}  // namespace

PrimalPoint CompleteNetworkSolution::point(int n) const {
  Matrix X = Matrix::Constant(n, n, rho_x * x);
  X.diagonal().setConstant(x);
  Matrix Y = Matrix::Constant(n, n, rho_y * y);
  Y.diagonal().setConstant(y);
  return {SymMatrix(X), Y};
}

Environment complete_environment(int n, double beta, double rho, double v, double c) {
  check_complete(n, beta);
  Matrix V = Matrix::Constant(n, n, c);
  V.diagonal().setConstant(v);
  const NetworkSpec net = make_network(complete_graph(n), beta);
  const SymMatrix Z = rho == 1.0 ? common_state(n) : equicorrelated_state(n, rho);
  return network_environment(net, V, Matrix::Zero(n, n), Z);
}

CompleteNetworkSolution complete_common(int n, double beta, double v, double c) {
  check_complete(n, beta);
  require_finite(Vector::Constant(1, v), "v");
  require_finite(Vector::Constant(1, c), "c");
  CompleteNetworkSolution out;
  out.rho_y = 1.0;
  if (no_disclosure_region(n, v, c)) {
    out.regime = Regime::NoDisclosure;
    finish(out, n, v, c);
    return out;
  }
  const double f = -(1.0 + (n + 1) * beta) / (2.0 * n - 1.0 + (n - 1) * beta);
  if (c >= -v / (n - 1) && c >= f * v) {
    out.regime = Regime::FullDisclosure;
    const double q1 = 1.0 - (n - 1) * beta;
    out.y = 1.0 / q1;
    out.x = out.y * out.y;
    out.rho_x = 1.0;
    out.lambda = 2.0 * (v + (n - 1) * c) / q1;
    finish(out, n, v, c);
    return out;
  }
  out.regime = Regime::Partial;
  const double g = beta * v + (2.0 + beta) * c;
  const double h = c + beta * v;
  out.x = (c - v) * g / (4.0 * n * (1.0 + beta) * h * h);
  out.y = (c - v) / (2.0 * n * h);
  out.rho_x = -((1.0 + 2.0 * beta) * v + c) / ((n - 1) * g);
  out.lambda = (v - c) / (1.0 + beta);
  finish(out, n, v, c);
  out.s = (1.0 + beta) * (c - v) / (n * g);
  return out;
}

CompleteNetworkSolution complete_private(int n, double beta, double rho, double v, double c,
                                         const std::optional<CompleteNetworkSolution>& seed) {
  check_complete(n, beta);
  if (!(rho > -1.0 / (n - 1) && rho < 1.0)) throw ParameterOutOfRange("rho outside (-1/(n-1), 1)");
  const CompleteSpectrum sp = spectrum(n, beta, rho, v, c);

  if (no_disclosure_region(n, v, c)) {
    CompleteNetworkSolution out;
    out.regime = Regime::NoDisclosure;
    return out;
  }
  if (v >= 0 && std::abs(c + beta * v) <= 1e-12 * (1.0 + std::abs(v))) {
    CompleteNetworkSolution out = from_lambda(sp, 2.0 * v);
    out.regime = Regime::FullDisclosure;
    finish(out, n, v, c);
    return out;
  }

  CompleteNetworkSolution start;
  if (seed) {
    start = *seed;
  } else {
    // Outside the no-disclosure region max_k p_k > 0, so the reduced
    // equation goes from +inf at the left end to 0- at +inf.
    const double lmin = std::max(sp.p[0] / sp.q[0], sp.p[1] / sp.q[1]);
    double lo_t = 1e-12 * (1.0 + std::abs(lmin)), hi_t = 1.0 + std::abs(lmin);
    while (reduced_obedience(sp, lmin + lo_t) <= 0 && lo_t > 1e-300) lo_t *= 0.5;
    int guard = 0;
    while (reduced_obedience(sp, lmin + hi_t) >= 0 && guard++ < 200) hi_t *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo_t + hi_t);
      if (mid == lo_t || mid == hi_t) break;
      (reduced_obedience(sp, lmin + mid) > 0 ? lo_t : hi_t) = mid;
    }
    start = from_lambda(sp, lmin + 0.5 * (lo_t + hi_t));
  }

  const FiveSystem sys{n, beta, rho, sp};
  Vector u(5);
  u << start.x, start.y, start.rho_x, start.rho_y, start.lambda;
  Matrix jac;
  Vector f = sys.residual(u, &jac);
  for (int it = 0; it < 50 && f.cwiseAbs().maxCoeff() > 1e-15 * (1.0 + u.cwiseAbs().maxCoeff()); ++it) {
    const Vector step = jac.colPivHouseholderQr().solve(-f);
    if (!step.allFinite()) break;
    bool moved = false;
    for (double t = 1.0; t >= 1.0 / 1024; t *= 0.5) {
      const Vector trial = u + t * step;
      Matrix jt;
      const Vector ft = sys.residual(trial, &jt);
      if (ft.allFinite() && ft.norm() < f.norm()) {
        u = trial;
        f = ft;
        jac = jt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  const double res = f.cwiseAbs().maxCoeff();
  if (!(res <= 1e-9)) throw NewtonFailed("private-value system did not converge", res);

  CompleteNetworkSolution out;
  out.regime = Regime::Partial;
  out.x = u(0);
  out.y = u(1);
  out.rho_x = u(2);
  out.rho_y = u(3);
  out.lambda = u(4);
  out.residual = res;
  finish(out, n, v, c);
  return out;
}

CompleteNetworkSolution complete_from_point(const PrimalPoint& point, double lambda) {
  const int n = point.X.order();
  CompleteNetworkSolution out;
  out.x = point.X(0, 0);
  out.y = point.Y(0, 0);
  out.rho_x = out.x != 0 && n > 1 ? point.X(0, 1) / out.x : 0.0;
  out.rho_y = out.y != 0 && n > 1 ? point.Y(0, 1) / out.y : 0.0;
  out.lambda = lambda;
  return out;
}

PublicDesignSolution public_design(const Environment& env) {
  const EigenDecomposition ez = eig_sym(env.Z);
  if (!(ez.values(env.m - 1) > 1e-12 * std::max(1.0, ez.values(0))))
    throw DegenerateState("public design needs a nonsingular state covariance");
  const SymMatrix zh = sqrt_psd(env.Z);
  const Matrix zh_inv = ez.vectors * ez.values.cwiseSqrt().cwiseInverse().asDiagonal() * ez.vectors.transpose();

  PublicDesignSolution out;
  out.C_hat = SymMatrix(zh.mat() * disclosure_objective(env).mat() * zh.mat());
  const EigenDecomposition ec = eig_sym(out.C_hat);
  out.gamma = ec.values;
  out.U = ec.vectors;
  const double eps = 1e-9 * (1.0 + norm2(out.C_hat));
  while (out.k_star < env.m && out.gamma(out.k_star) > eps) ++out.k_star;
  out.value = out.gamma.head(out.k_star).sum();
  const Matrix uk = out.U.leftCols(out.k_star);
  out.S = SymMatrix(zh.mat() * uk * uk.transpose() * zh.mat());
  out.signal_map = uk.transpose() * zh_inv;

  Matrix big = Matrix::Zero(env.n + env.m, env.n + env.m);
  big.topLeftCorner(env.n, env.n) = env.V.mat();
  big.topRightCorner(env.n, env.m) = env.W / 2.0;
  big.bottomLeftCorner(env.m, env.n) = env.W.transpose() / 2.0;
  const SymMatrix vbig(big);
  const Vector vb = eig_sym(vbig).values;
  const double eps_v = 1e-9 * (1.0 + norm2(vbig));
  for (int k = 0; k < vb.size(); ++k)
    if (vb(k) > eps_v) ++out.p_objective;
  out.k_star_bound_holds = out.p_objective - env.n <= out.k_star && out.k_star <= out.p_objective;
  return out;
}

PublicGlobalTest public_globally_optimal(const Environment& env, const PublicDesignSolution& sol) {
  const int n = env.n, m = env.m;
  const SymMatrix zh = sqrt_psd(env.Z);
  const Matrix f = response_map(env);
  const Matrix on = zh.mat() * sol.U.leftCols(sol.k_star);
  const Matrix off = zh.mat() * sol.U.rightCols(m - sol.k_star);

  // stacked equations e(lambda) = e0 + sum_i lambda_i e_i
  auto equations = [&](const Matrix& a, const Matrix& b) {
    const Matrix first = (a * f - b) * on;
    const Matrix second = b * off;
    Vector e(first.size() + second.size());
    e << Eigen::Map<const Vector>(first.data(), first.size()), Eigen::Map<const Vector>(second.data(), second.size());
    return e;
  };
  const Vector e0 = equations(-env.V.mat(), env.W / 2.0);
  Matrix cols(e0.size(), n);
  for (int i = 0; i < n; ++i) {
    Matrix ei = Matrix::Zero(n, n);
    ei(i, i) = 1.0;
    const Matrix eq = ei * env.Q;
    cols.col(i) = equations((eq + eq.transpose()) / 2.0, ei * env.R / 2.0);
  }
  PublicGlobalTest out;
  out.lambda = cols.completeOrthogonalDecomposition().solve(-e0);
  out.residual = (cols * out.lambda + e0).norm() / (1.0 + e0.norm());
  const DualCertificate cert = certificate(env, out.lambda);
  out.a_lambda_min = eig_sym(cert.A).values(n - 1);
  out.verdict = out.residual <= 1e-8 && out.a_lambda_min >= -1e-9 * (1.0 + norm2(cert.A));
  return out;
}

CanonicalSDP public_lifted_sdp(const SymMatrix& C_hat) {
  const int m = C_hat.order();
  CanonicalSDP p;
  p.order = 2 * m;
  Matrix c = Matrix::Zero(2 * m, 2 * m);
  c.topLeftCorner(m, m) = C_hat.mat();
  p.C = SymMatrix(c);
  for (int k = 0; k < m; ++k)
    for (int l = k; l < m; ++l) {
      Matrix a = Matrix::Zero(2 * m, 2 * m);
      a(k, l) += 0.5;
      a(l, k) += 0.5;
      a(m + k, m + l) += 0.5;
      a(m + l, m + k) += 0.5;
      p.constraints.push_back({SymMatrix(a), k == l ? 1.0 : 0.0});
    }
  return p;
}

}  // namespace lqgid
