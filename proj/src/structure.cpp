#include "lqgid/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lqgid {

GaussianInfoStructure unchecked_structure(const Environment& env, const PrimalPoint& point) {
  if (point.X.order() != env.n || point.Y.rows() != env.n || point.Y.cols() != env.m)
    throw DimensionMismatch("primal point does not match environment");
  GaussianInfoStructure gis;
  gis.n = env.n;
  gis.m = env.m;
  gis.mean.resize(env.n + env.m);
  gis.mean << mean_actions(env), env.theta_mean;
  gis.cov = stack(env, point);
  return gis;
}

GaussianInfoStructure from_primal(const Environment& env, const PrimalPoint& point, double tol) {
  if (!is_primal_feasible(env, point, tol)) {
    const FeasibilityResiduals r = primal_residuals(env, point);
    throw InfeasiblePoint("point is not primal feasible (obedience residual " + std::to_string(r.obedience) +
                          ", lambda_min " + std::to_string(r.psd_min) + ")");
  }
  return unchecked_structure(env, point);
}

namespace {

std::vector<int> range(int from, int count) {
  std::vector<int> v(count);
  std::iota(v.begin(), v.end(), from);
  return v;
}

GaussianLaw law_of(const GaussianInfoStructure& gis) { return {gis.mean, gis.cov}; }

}  // namespace

ConditionalTest noise_freeness(const GaussianInfoStructure& gis, double tol) {
  const Conditional c = gaussian_conditional(law_of(gis), range(0, gis.n), range(gis.n, gis.m));
  return {c.cov.mat().norm() <= tol * (1.0 + gis.X().norm()), c.cov};
}

ConditionalTest state_identifiability(const GaussianInfoStructure& gis, double tol) {
  const Conditional c = gaussian_conditional(law_of(gis), range(gis.n, gis.m), range(0, gis.n));
  return {c.cov.mat().norm() <= tol * (1.0 + gis.Z().norm()), c.cov};
}

Metrics metrics(const Environment& env, const GaussianInfoStructure& gis) {
  const int n = gis.n;
  // (sigma, R theta)
  const Matrix cy = gis.Y() * env.R.transpose();
  Matrix joint(2 * n, 2 * n);
  joint << gis.X(), cy, cy.transpose(), env.R * gis.Z() * env.R.transpose();
  Vector mean(2 * n);
  mean << gis.mean.head(n), env.R * gis.mean.tail(gis.m);
  const GaussianLaw personal{mean, SymMatrix(joint)};
  const GaussianLaw full = law_of(gis);

  // Action variances below the solver's psd resolution count as zero.
  const double floor = 1e-12 * (1.0 + gis.cov.mat().norm());
  const double action_floor = 1e-9 * (1.0 + gis.cov.mat().norm());
  Metrics out;
  out.s.resize(n);
  out.S.resize(n);
  out.N.resize(n);
  for (int i = 0; i < n; ++i) {
    const double var_state = personal.cov(n + i, n + i);
    if (var_state > floor) {
      const double own = gaussian_conditional(personal, {n + i}, {i}).cov(0, 0);
      const double all = gaussian_conditional(personal, {n + i}, range(0, n)).cov(0, 0);
      // shares; clip the roundoff past the ends
      out.s[i] = std::clamp(1.0 - own / var_state, 0.0, 1.0);
      out.S[i] = std::clamp(1.0 - all / var_state, 0.0, 1.0);
    }
    const double var_action = full.cov(i, i);
    if (var_action > action_floor)
      out.N[i] = std::clamp(gaussian_conditional(full, {i}, range(n, gis.m)).cov(0, 0) / var_action, 0.0, 1.0);
  }
  return out;
}

namespace {

// Mean-zero check on a stream of values. The standard error is floored at
// 1e-12 of the magnitude of the terms that were differenced, so roundoff in an
// exactly-zero quantity does not masquerade as a large z-score.
struct Running {
  double sum = 0, sumsq = 0, scale = 0;
  void add(double v, double magnitude) {
    sum += v;
    sumsq += v * v;
    scale += magnitude * magnitude;
  }
  double z(long count) const {
    const double mean = sum / count;
    const double var = std::max(0.0, (sumsq - sum * mean) / std::max(1L, count - 1));
    const double se = std::max(std::sqrt(var / count), 1e-12 * std::sqrt(scale / count));
    if (se == 0.0) return mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(mean) / se;
  }
};

}  // namespace

McObedience mc_obedience(const Environment& env, const GaussianInfoStructure& gis, long count,
                         std::uint64_t seed) {
  if (count < 2) throw Error("mc_obedience needs at least two draws");
  const int n = gis.n, m = gis.m;
  GaussianSampler sampler(law_of(gis));
  CounterRng rng(seed);
  const Vector abar = gis.mean.head(n);
  const Vector tbar = gis.mean.tail(m);

  std::vector<Running> m1(n), m2(n);
  // slope of e on sigma through the origin
  std::vector<double> ss(n, 0.0), es(n, 0.0), ee(n, 0.0), mag(n, 0.0);
  Vector draw(n + m), qs(n), rt(n), qsc(n), rtc(n);
  for (long t = 0; t < count; ++t) {
    sampler.draw(rng, draw);
    qs.noalias() = env.Q * draw.head(n);
    rt.noalias() = env.R * draw.tail(m);
    qsc.noalias() = env.Q * (draw.head(n) - abar);
    rtc.noalias() = env.R * (draw.tail(m) - tbar);
    for (int i = 0; i < n; ++i) {
      const double si = draw(i) - abar(i);
      const double ec = qsc(i) - rtc(i);
      const double size = std::abs(qsc(i)) + std::abs(rtc(i));
      m1[i].add(qs(i) - rt(i), std::abs(qs(i)) + std::abs(rt(i)));
      m2[i].add(ec * si, size * std::abs(si));
      ss[i] += si * si;
      es[i] += ec * si;
      ee[i] += ec * ec;
      mag[i] += size * size;
    }
  }

  McObedience out;
  out.count = count;
  for (int i = 0; i < n; ++i) {
    out.moment1_residual = std::max(out.moment1_residual, m1[i].z(count));
    out.moment2_residual = std::max(out.moment2_residual, m2[i].z(count));
    if (ss[i] > 0) {
      const double slope = es[i] / ss[i];
      const double rss = std::max(0.0, ee[i] - slope * es[i]);
      const double se = std::max(std::sqrt(rss / std::max(1L, count - 1) / ss[i]),
                                 1e-12 * std::sqrt(mag[i] / ss[i]));
      const double z = se > 0 ? std::abs(slope) / se : (slope == 0 ? 0.0 : std::numeric_limits<double>::infinity());
      out.foc_regression_residual = std::max(out.foc_regression_residual, z);
    }
  }
  return out;
}

}  // namespace lqgid
