#include "lqgid/matcore.hpp"
#include "random_env.hpp"

#include <doctest.h>

#include <cmath>

using namespace lqgid;
using lqgid::testing::gaussian_matrix;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

SymMatrix random_sym(std::mt19937_64& rng, int n) {
  const Matrix a = gaussian_matrix(rng, n, n);
  return SymMatrix(a + a.transpose());
}

// Roots of det(M - t I) for a 3x3 symmetric M by the trigonometric formula.
Vector cubic_eigenvalues(const Matrix& m) {
  const double q = m.trace() / 3;
  const Matrix b = m - q * Matrix::Identity(3, 3);
  const double p = std::sqrt((b * b).trace() / 6);
  const double r = std::clamp((b / p).determinant() / 2, -1.0, 1.0);
  const double phi = std::acos(r) / 3;
  Vector out(3);
  out << q + 2 * p * std::cos(phi), q + 2 * p * std::cos(phi + 4 * M_PI / 3), q + 2 * p * std::cos(phi + 2 * M_PI / 3);
  std::sort(out.data(), out.data() + 3, std::greater<>());
  return out;
}

}  // namespace

TEST_CASE("SymMatrix construction symmetrizes exactly") {
  Matrix a(2, 2);
  a << 1, 2, 0.1, 3;
  const SymMatrix s(a);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == doctest::Approx(1.05));
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(SymMatrix{bad}, NonFiniteInput);
}

TEST_CASE("eig_sym on the simple cases") {
  const EigenDecomposition i3 = eig_sym(SymMatrix::identity(3));
  CHECK((i3.values - Vector::Ones(3)).norm() < 1e-14);

  const EigenDecomposition d = eig_sym(SymMatrix(diag({3, 1})));
  CHECK(d.values(0) == doctest::Approx(3));
  CHECK(d.values(1) == doctest::Approx(1));
  CHECK((d.vectors - Matrix::Identity(2, 2)).norm() < 1e-14);

  Matrix k3 = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  const Vector want = cubic_eigenvalues(k3);
  const EigenDecomposition e = eig_sym(SymMatrix(k3));
  CHECK((e.values - want).norm() < 1e-12);
  CHECK(e.values(0) == doctest::Approx(2));
  CHECK(e.values(2) == doctest::Approx(-1));
}

TEST_CASE("eig_sym agrees with an independent solver") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 9;
    const SymMatrix m = random_sym(rng, n);
    const EigenDecomposition e = eig_sym(m);
    const Matrix& u = e.vectors;
    CHECK((u * e.values.asDiagonal() * u.transpose() - m.mat()).norm() <= 1e-10 * (1 + m.mat().norm()));
    CHECK((u.transpose() * u - Matrix::Identity(n, n)).norm() <= 1e-10);
    Vector ref = Eigen::SelfAdjointEigenSolver<Matrix>(m.mat()).eigenvalues().reverse();
    CHECK((e.values - ref).norm() <= 1e-10 * (1 + m.mat().norm()));
    for (int i = 0; i + 1 < n; ++i) CHECK(e.values(i) >= e.values(i + 1));
  }
}

TEST_CASE("pinv examples and Penrose identities") {
  CHECK(pinv(Matrix::Zero(3, 2)).norm() == 0);
  CHECK((pinv(diag({2, 4})) - diag({0.5, 0.25})).norm() < 1e-14);
  CHECK((pinv(diag({2, 0})) - diag({0.5, 0})).norm() < 1e-14);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const int r = 1 + t % 5, c = 1 + (t / 5) % 6, k = 1 + t % std::min(r, c);
    const Matrix a = gaussian_matrix(rng, r, k) * gaussian_matrix(rng, k, c);
    const Matrix p = pinv(a);
    const double s = 1 + a.norm();
    CHECK((a * p * a - a).norm() <= 1e-9 * s);
    CHECK((p * a * p - p).norm() <= 1e-9 * (1 + p.norm()));
    CHECK((a * p - (a * p).transpose()).norm() <= 1e-9 * s);
    CHECK((p * a - (p * a).transpose()).norm() <= 1e-9 * s);
    const Matrix ref = a.completeOrthogonalDecomposition().pseudoInverse();
    CHECK((p - ref).norm() <= 1e-8 * (1 + ref.norm()));
    const SymMatrix sa(a.transpose() * a);
    CHECK((pinv_sym(sa).mat() - pinv(sa.mat())).norm() <= 1e-8 * (1 + pinv(sa.mat()).norm()));
  }
}

TEST_CASE("is_psd examples") {
  CHECK(is_psd(SymMatrix::identity(3), 1e-9).psd);
  const PsdTest t = is_psd(SymMatrix(diag({1, -1})), 1e-9);
  CHECK_FALSE(t.psd);
  CHECK(t.lambda_min == doctest::Approx(-1));
  Matrix r = Matrix::Ones(2, 2);
  const PsdTest b = is_psd(SymMatrix(r), 1e-9);
  CHECK(b.psd);
  CHECK(std::abs(b.lambda_min) < 1e-14);
}

TEST_CASE("block_psd examples") {
  const SymMatrix i2 = SymMatrix::identity(2);
  CHECK(block_psd(i2, Matrix::Zero(2, 2), i2, 1e-9));
  Matrix b(2, 1);
  b << 0, 1;
  CHECK_FALSE(block_psd(SymMatrix(diag({1, 0})), b, SymMatrix(diag({1})), 1e-9));
  // brute force on the assembled matrix agrees
  Matrix full(3, 3);
  full << 1, 0, 0, 0, 0, 1, 0, 1, 1;
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(full).eigenvalues().minCoeff() < -0.1);
  CHECK(block_psd(SymMatrix(diag({1})), Matrix::Ones(1, 1), SymMatrix(diag({1})), 1e-9));
}

TEST_CASE("block_psd agrees with a direct eigencheck") {
  std::mt19937_64 rng(23);
  int agree = 0, total = 0;
  for (int t = 0; t < 300; ++t) {
    const int p = 1 + t % 4, q = 1 + (t / 4) % 3;
    // PSD joint of random rank, then perturb some of them
    const int k = 1 + t % (p + q);
    const Matrix f = gaussian_matrix(rng, p + q, k);
    Matrix m = f * f.transpose();
    if (t % 3 == 1) m(p + q - 1, p + q - 1) -= 0.5;
    if (t % 3 == 2) m += 0.3 * Matrix::Identity(p + q, p + q);
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff();
    const double scale = 1 + m.norm();
    if (std::abs(lmin) < 1e-6 * scale) continue;  // stay clear of the boundary
    ++total;
    const bool direct = lmin >= 0;
    const bool blocks = block_psd(SymMatrix(m.topLeftCorner(p, p)), m.topRightCorner(p, q),
                                  SymMatrix(m.bottomRightCorner(q, q)), 1e-9);
    agree += direct == blocks;
  }
  CHECK(total > 150);
  CHECK(agree == total);
  // rank-deficient PSD matrices sit on the boundary and must be accepted
  for (int t = 0; t < 50; ++t) {
    const Matrix f = gaussian_matrix(rng, 5, 2);
    const Matrix m = f * f.transpose();
    CHECK(block_psd(SymMatrix(m.topLeftCorner(3, 3)), m.topRightCorner(3, 2), SymMatrix(m.bottomRightCorner(2, 2)),
                    1e-9));
  }
}

TEST_CASE("sqrt_psd examples") {
  CHECK((sqrt_psd(SymMatrix::identity(3)).mat() - Matrix::Identity(3, 3)).norm() < 1e-14);
  CHECK((sqrt_psd(SymMatrix(diag({4, 9}))).mat() - diag({2, 3})).norm() < 1e-14);
  const Matrix r = sqrt_psd(SymMatrix(Matrix::Ones(2, 2))).mat();
  CHECK((r - Matrix::Ones(2, 2) / std::sqrt(2.0)).norm() < 1e-14);
  CHECK((r * r - Matrix::Ones(2, 2)).norm() < 1e-14);
  CHECK_THROWS_AS(sqrt_psd(SymMatrix(diag({1, -1}))), NotPositiveSemidefinite);
}

TEST_CASE("gaussian_conditional") {
  std::mt19937_64 rng(3);
  const Matrix f = gaussian_matrix(rng, 4, 4);
  Matrix cov = f * f.transpose();
  cov.block(0, 2, 2, 2).setZero();
  cov.block(2, 0, 2, 2).setZero();
  const GaussianLaw ind = make_gaussian(Vector::Zero(4), SymMatrix(cov));
  const Conditional c = gaussian_conditional(ind, {0, 1}, {2, 3});
  CHECK((c.cov.mat() - cov.topLeftCorner(2, 2)).norm() < 1e-12);
  CHECK(c.K.norm() < 1e-12);

  Matrix dup = Matrix::Ones(2, 2);
  Vector mu(2);
  mu << 1.5, 1.5;
  const Conditional d = gaussian_conditional(make_gaussian(mu, SymMatrix(dup)), {0}, {1});
  CHECK(std::abs(d.cov(0, 0)) < 1e-12);
  CHECK(d.K(0, 0) == doctest::Approx(1));
  CHECK(std::abs(d.c(0)) < 1e-12);

  // rho = 0.5, Monte Carlo oracle for the conditional variance: regress x1
  // on x2 and take the residual variance.
  Matrix b(2, 2);
  b << 1, 0.5, 0.5, 1;
  const GaussianLaw law = make_gaussian(Vector::Zero(2), SymMatrix(b));
  CHECK(gaussian_conditional(law, {0}, {1}).cov(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
  const Matrix draws = sample_gaussian(law, 1000000, 99);
  const Vector x1 = draws.col(0), x2 = draws.col(1);
  const double slope = x1.dot(x2) / x2.squaredNorm();
  const Vector resid = x1 - slope * x2;
  const double var = resid.squaredNorm() / (resid.size() - 1);
  // sd of a sample variance of N(0, 0.75): 0.75 sqrt(2 / N)
  CHECK(std::abs(var - 0.75) <= 3 * 0.75 * std::sqrt(2.0 / 1e6));
}

TEST_CASE("gaussian conditional covariance is PSD and dominated") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 60; ++t) {
    const int d = 2 + t % 6, k = 1 + t % d;
    const Matrix f = gaussian_matrix(rng, d, k);
    const GaussianLaw law = make_gaussian(Vector::Zero(d), SymMatrix(f * f.transpose()));
    std::vector<int> first, second;
    for (int i = 0; i < d; ++i) (i % 2 ? second : first).push_back(i);
    const Conditional c = gaussian_conditional(law, first, second);
    Matrix sub(first.size(), first.size());
    for (std::size_t i = 0; i < first.size(); ++i)
      for (std::size_t j = 0; j < first.size(); ++j) sub(i, j) = law.cov(first[i], first[j]);
    const double s = 1 + sub.norm();
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(c.cov.mat()).eigenvalues().minCoeff() >= -1e-9 * s);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(sub - c.cov.mat()).eigenvalues().minCoeff() >= -1e-9 * s);
  }
}

TEST_CASE("sampling") {
  const GaussianLaw point = make_gaussian(Vector::Constant(3, 2.5), SymMatrix::zero(3));
  const Matrix p = sample_gaussian(point, 100, 1);
  CHECK((p.rowwise() - Vector::Constant(3, 2.5).transpose()).norm() == 0);

  const GaussianLaw std1 = make_gaussian(Vector::Zero(1), SymMatrix::identity(1));
  const Matrix d = sample_gaussian(std1, 1000000, 42);
  CHECK(std::abs(d.mean()) < 0.01);
  CHECK(sample_gaussian(std1, 1000, 7) == sample_gaussian(std1, 1000, 7));
  CHECK(sample_gaussian(std1, 1000, 7) != sample_gaussian(std1, 1000, 8));
}

TEST_CASE("CounterRng matches the published SplitMix64 stream") {
  // reference outputs of splitmix64 started from state 0
  CounterRng r(0);
  CHECK(r.next_u64() == 0xE220A8397B1DCDAFull);
  CHECK(r.next_u64() == 0x6E789E6AA1B965F4ull);
  CHECK(r.next_u64() == 0x06C45D188009454Full);
  CHECK(r.counter() == 3);
}
