#pragma once

#include "lqgid/envmodel.hpp"

#include <random>

namespace lqgid::testing {

inline Matrix gaussian_matrix(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

// Q with symmetric part bounded below by 0.2; Z of full rank unless
// `deficient`, in which case its rank is m - 1 (diagonal still positive).
inline Environment random_environment(std::mt19937_64& rng, int n, int m, bool deficient = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix Q = Matrix::Identity(n, n) + 0.5 * gaussian_matrix(rng, n, n) / std::sqrt(double(n));
  const double lo = Eigen::SelfAdjointEigenSolver<Matrix>((Q + Q.transpose()) / 2).eigenvalues().minCoeff();
  if (lo < 0.2) Q += (0.2 - lo) * Matrix::Identity(n, n);
  const Matrix R = gaussian_matrix(rng, n, m);
  const Matrix A = gaussian_matrix(rng, n, n);
  const Matrix V = (A + A.transpose()) / 2 + (u(rng) - 0.3) * Matrix::Identity(n, n);
  const Matrix W = u(rng) < 0.3 ? Matrix::Zero(n, m) : Matrix(gaussian_matrix(rng, n, m));
  const int rank = deficient && m > 1 ? m - 1 : m;
  const Matrix L = gaussian_matrix(rng, m, rank);
  Matrix Z = L * L.transpose() / rank;
  if (!deficient) Z += 0.05 * Matrix::Identity(m, m);
  const Vector mean = gaussian_matrix(rng, m, 1).col(0);
  return make_environment(Q, R, V, W, Z, mean);
}

}  // namespace lqgid::testing
