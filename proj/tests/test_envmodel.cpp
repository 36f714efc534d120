#include "lqgid/envmodel.hpp"
#include "random_env.hpp"

#include <doctest.h>

#include <cmath>

using namespace lqgid;

namespace {

Matrix m1(double x) { return Matrix::Constant(1, 1, x); }

Environment scalar_env(double q, double r, double v, double w, double z, double mean = 0) {
  return make_environment(m1(q), m1(r), m1(v), m1(w), m1(z), Vector::Constant(1, mean));
}

}  // namespace

TEST_CASE("make_environment validation") {
  CHECK_NOTHROW(scalar_env(1, 1, 1, 0, 1));
  CHECK_THROWS_AS(scalar_env(0, 1, 1, 0, 1), BasicAssumptionViolated);
  CHECK_THROWS_AS(scalar_env(1, 1, 1, 0, 0), DegenerateState);
  CHECK_THROWS_AS(scalar_env(1, 1, 1, 0, -1), DegenerateState);
  Matrix q(2, 2);
  q << 1, 0, 0, 1;
  CHECK_THROWS_AS(make_environment(q, m1(1), m1(1), m1(0), m1(1), Vector::Zero(1)), DimensionMismatch);
}

TEST_CASE("network admissible range") {
  const Matrix k2 = complete_graph(2);
  CHECK_NOTHROW(make_network(k2, 0.99));
  CHECK_THROWS_AS(make_network(k2, 1.01), BetaOutOfRange);
  CHECK_THROWS_AS(make_network(k2, -1.0), BetaOutOfRange);

  for (int n = 2; n <= 7; ++n) {
    const auto [lo, hi] = admissible_beta(complete_graph(n));
    CHECK(lo == doctest::Approx(-1.0));
    CHECK(hi == doctest::Approx(1.0 / (n - 1)));
  }
  const auto [lo, hi] = admissible_beta(cycle_graph(4));
  CHECK(lo == doctest::Approx(-0.5));
  CHECK(hi == doctest::Approx(0.5));
  CHECK_NOTHROW(make_network(cycle_graph(4), -0.4));

  Matrix bad = complete_graph(3);
  bad(0, 0) = 1;
  CHECK_THROWS_AS(make_network(bad, 0.1), InvalidNetwork);
  bad = complete_graph(3);
  bad(0, 1) = -1;
  CHECK_THROWS_AS(make_network(bad, 0.1), InvalidNetwork);
}

TEST_CASE("cycle eigenvalues") {
  for (int n = 3; n <= 9; ++n) {
    Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(cycle_graph(n)).eigenvalues();
    std::vector<double> want;
    for (int j = 0; j < n; ++j) want.push_back(2 * std::cos(2 * M_PI * j / n));
    std::sort(want.begin(), want.end());
    for (int j = 0; j < n; ++j) CHECK(ev(j) == doctest::Approx(want[j]).epsilon(1e-12));
  }
}

TEST_CASE("network environment") {
  const NetworkSpec net = make_network(complete_graph(3), 0.0);
  const Environment e = network_environment(net, Matrix::Identity(3, 3), Matrix::Zero(3, 3), Matrix::Identity(3, 3));
  CHECK((e.Q - Matrix::Identity(3, 3)).norm() == 0);
  const NetworkSpec star = make_network(star_graph(4), -0.2);
  const Environment s = network_environment(star, Matrix::Identity(4, 4), Matrix::Zero(4, 4), Matrix::Identity(4, 4));
  CHECK(s.Q(0, 1) == doctest::Approx(0.2));
  CHECK(s.Q(1, 0) == doctest::Approx(0.2));
  CHECK(s.Q(1, 2) == 0);
}

TEST_CASE("welfare environments") {
  const NetworkSpec net = make_network(cycle_graph(4), 0.3);
  const Environment w = welfare_environment(net, SymMatrix::identity(4), Vector::Ones(4));
  CHECK((w.V.mat() - Matrix::Identity(4, 4)).norm() == 0);
  CHECK(w.W.isZero(0));
  const Environment w2 = welfare_environment(net, SymMatrix::identity(4), Vector::Constant(4, 2));
  CHECK((w2.V.mat() - 2 * Matrix::Identity(4, 4)).norm() == 0);

  Matrix q(2, 2);
  q << 1, 0.2, 0.1, 3;
  const Environment h =
      welfare_environment(q, Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2), Vector::Ones(2));
  CHECK(h.V(0, 0) == 1);
  CHECK(h.V(1, 1) == 3);
  CHECK(h.V(0, 1) == 0);
}

TEST_CASE("PDC") {
  std::mt19937_64 rng(2);
  Environment e = testing::random_environment(rng, 3, 2);
  e.W.setZero();
  auto d = pdc_check(e);
  REQUIRE(d);
  CHECK(d->norm() == 0);
  const Environment t = pdc_transform(e);
  CHECK((t.V.mat() - e.V.mat()).norm() == 0);

  const Environment s = scalar_env(1, 2, 1, 6, 1);
  auto ds = pdc_check(s);
  REQUIRE(ds);
  CHECK((*ds)(0) == doctest::Approx(3));

  Matrix w(2, 2);
  w << 1, 0.5, 0, 1;
  const Environment nd = make_environment(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2), w,
                                          Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK_FALSE(pdc_check(nd));
  CHECK_THROWS_AS(pdc_transform(nd), PdcNotSatisfied);

  // personal state: V~ = V + (W Q + Q^T W)/2
  Matrix q(2, 2);
  q << 1, 0.3, -0.2, 1;
  Matrix wd = Matrix::Zero(2, 2);
  wd.diagonal() << 0.7, -0.4;
  const Environment ps =
      make_environment(q, Matrix::Identity(2, 2), Matrix::Identity(2, 2), wd, Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(is_personal_state(ps));
  const Environment pt = pdc_transform(ps);
  CHECK((pt.V.mat() - (Matrix::Identity(2, 2) + (wd * q + q.transpose() * wd) / 2)).norm() < 1e-14);
  CHECK(pt.W.isZero(0));

  // m = 1: delta_i = w_i / r_i
  Matrix r(2, 1), w1(2, 1);
  r << 2, -1;
  w1 << 1, 3;
  const Environment one =
      make_environment(q, r, Matrix::Identity(2, 2), w1, Matrix::Identity(1, 1), Vector::Zero(1));
  auto d1 = pdc_check(one);
  REQUIRE(d1);
  CHECK((*d1)(0) == doctest::Approx(0.5));
  CHECK((*d1)(1) == doctest::Approx(-3));
}

TEST_CASE("PDC transform preserves the value of every feasible point") {
  // V~ • X equals V • X + W • Y whenever obedience holds; check at full
  // disclosure, which is feasible in every environment.
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    Environment e = testing::random_environment(rng, 3, 3);
    e.R = Matrix::Identity(3, 3);
    e.W = Matrix::Zero(3, 3);
    e.W.diagonal() = testing::gaussian_matrix(rng, 3, 1).col(0);
    CHECK(full_disclosure_value(pdc_transform(e)) == doctest::Approx(full_disclosure_value(e)).epsilon(1e-10));
  }
}

TEST_CASE("mean actions") {
  const Environment a = make_environment(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                                         Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(mean_actions(a).norm() == 0);
  Vector mu(2);
  mu << 1, 2;
  const Environment b = make_environment(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                                         Matrix::Zero(2, 2), Matrix::Identity(2, 2), mu);
  CHECK((mean_actions(b) - mu).norm() == 0);
  CHECK(mean_actions(scalar_env(2, 1, 1, 0, 1, 4))(0) == doctest::Approx(2));
}

TEST_CASE("disclosure values") {
  std::mt19937_64 rng(4);
  const Environment e = testing::random_environment(rng, 3, 4);
  CHECK(no_disclosure_value(e) == 0);

  const NetworkSpec net = make_network(complete_graph(3), 0.0);
  Matrix z(3, 3);
  z << 2, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 0.7;
  const Environment w = welfare_environment(net, SymMatrix(z), Vector::Ones(3));
  CHECK(full_disclosure_value(w) == doctest::Approx(z.trace()));

  // m = 1, n = 2: a = Q^{-1} r theta, value = (a' V a + w' a) z
  Matrix q(2, 2), r(2, 1), v(2, 2), wm(2, 1);
  q << 1, 0.4, 0.1, 2;
  r << 1, -1;
  v << 1, 0.2, 0.2, -0.5;
  wm << 0.3, 0.8;
  const Environment one = make_environment(q, r, v, wm, m1(2.5), Vector::Zero(1));
  const Vector a = q.lu().solve(r.col(0));
  const double cbar = a.dot(v * a) + wm.col(0).dot(a);
  CHECK(disclosure_objective(one)(0, 0) == doctest::Approx(cbar));
  CHECK(full_disclosure_value(one) == doctest::Approx(cbar * 2.5));
}
