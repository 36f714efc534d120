#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqgid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotPositiveSemidefinite : public Error {
 public:
  using Error::Error;
};

// Symmetric real matrix. Construction symmetrizes the input as (M + M^T)/2,
// so entries(i,j) == entries(j,i) holds bit-for-bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(int order);
  static SymMatrix identity(int order);

  int order() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  operator const Matrix&() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

struct EigenDecomposition {
  Vector values;   // non-increasing
  Matrix vectors;  // columns are eigenvectors
};

struct GaussianLaw {
  Vector mean;
  SymMatrix cov;
};

struct PsdTest {
  bool psd;
  double lambda_min;
};

struct Conditional {
  Matrix K;       // E[x1 | x2] = c + K x2
  Vector c;
  SymMatrix cov;  // Var[x1 | x2]
};

// Frobenius inner product A • B = tr(A^T B).
double inner(const Matrix& a, const Matrix& b);

// Spectral norm of a symmetric matrix.
double norm2(const SymMatrix& m);

// Spectral norm of a general matrix.
double norm2(const Matrix& m);

// Cyclic Jacobi eigendecomposition. Eigenvalues are sorted non-increasing;
// each eigenvector has its first nonzero component positive, and ties are
// ordered lexicographically by eigenvector.
EigenDecomposition eig_sym(const SymMatrix& m);

// Numerical-rank cut used throughout: rel * max(1, scale).
double rank_cut(double scale, double rel = 1e-9);

// Moore-Penrose pseudoinverse. Singular values at or below
// rank_tol * max(1, sigma_max) are treated as zero.
Matrix pinv(const Matrix& m, double rank_tol = 1e-9);

// Pseudoinverse of a symmetric matrix via eig_sym, same cut rule.
SymMatrix pinv_sym(const SymMatrix& m, double rank_tol = 1e-9);

// psd iff lambda_min >= -tol * (1 + ||M||_2).
PsdTest is_psd(const SymMatrix& m, double tol);

// PSD test of [[A, B], [B^T, C]] through the blocks: A >= 0, B in the range
// of A, and C - B^T A^+ B >= 0, each up to tol.
bool block_psd(const SymMatrix& a, const Matrix& b, const SymMatrix& c, double tol);

// Symmetric PSD square root. Eigenvalues in [-1e-6 ||M||, 0) are clipped.
SymMatrix sqrt_psd(const SymMatrix& m);

// Clip tiny negative eigenvalues (>= -1e-9 ||M||) to zero; throws on
// anything more negative.
SymMatrix clip_psd(const SymMatrix& m, double rel = 1e-9);

GaussianLaw make_gaussian(const Vector& mean, const SymMatrix& cov);

Conditional gaussian_conditional(const GaussianLaw& joint, const std::vector<int>& first,
                                 const std::vector<int>& second);

// SplitMix64 in counter form: the k-th output (k = 1, 2, ...) is
//   mix(seed + k * 0x9E3779B97F4A7C15)
// with mix(z):
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// Uniforms use the top 53 bits: (u64 >> 11) * 2^-53.
// Gaussians come in Box-Muller pairs from two consecutive uniforms u1, u2:
//   r = sqrt(-2 ln(1 - u1)), g1 = r cos(2 pi u2), g2 = r sin(2 pi u2).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  double next_uniform();
  double next_gaussian();
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Draws mean + F g with F F^T = cov (eigen factor, tiny negative
// eigenvalues clipped) and g standard normal from the caller's generator.
class GaussianSampler {
 public:
  explicit GaussianSampler(const GaussianLaw& law);
  int dim() const { return static_cast<int>(mean_.size()); }
  void draw(CounterRng& rng, Vector& out);

 private:
  Vector mean_;
  Matrix factor_;
  Vector g_;
};

// count x dim matrix, one draw per row. Deterministic for a fixed seed.
Matrix sample_gaussian(const GaussianLaw& law, int count, std::uint64_t seed);

void require_finite(const Matrix& m, const char* what);

}  // namespace lqgid
