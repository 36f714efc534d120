#include "lqgid/matcore.hpp"

#include <Eigen/Jacobi>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lqgid {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NonFiniteInput(std::string(what) + ": non-finite entries");
}

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("SymMatrix: input is not square");
  require_finite(m, "SymMatrix");
  m_ = (m + m.transpose()) * 0.5;
}

SymMatrix SymMatrix::zero(int order) { return SymMatrix(Matrix::Zero(order, order)); }

SymMatrix SymMatrix::identity(int order) { return SymMatrix(Matrix::Identity(order, order)); }

double inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("inner: shapes differ");
  return a.cwiseProduct(b).sum();
}

double norm2(const SymMatrix& m) {
  if (m.order() == 0) return 0.0;
  const Vector v = eig_sym(m).values;
  return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

namespace {

// Flip each column so its first component above 1e-12 in magnitude is positive.
void normalize_signs(Matrix& u) {
  for (int j = 0; j < u.cols(); ++j) {
    for (int i = 0; i < u.rows(); ++i) {
      if (std::abs(u(i, j)) > 1e-12) {
        if (u(i, j) < 0) u.col(j) *= -1.0;
        break;
      }
    }
  }
}

bool lex_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) < b(i) - 1e-12) return true;
    if (a(i) > b(i) + 1e-12) return false;
  }
  return false;
}

}  // namespace

EigenDecomposition eig_sym(const SymMatrix& sm) {
  const int n = sm.order();
  Matrix a = sm.mat();
  Matrix v = Matrix::Identity(n, n);
  const double fro = a.norm();
  if (n > 1 && fro > 0) {
    for (int sweep = 0; sweep < 100; ++sweep) {
      double off = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
      if (std::sqrt(2.0 * off) <= 1e-16 * fro) break;
      for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
          if (a(p, q) == 0.0) continue;
          Eigen::JacobiRotation<double> j;
          if (j.makeJacobi(a, p, q)) {
            a.applyOnTheLeft(p, q, j.adjoint());
            a.applyOnTheRight(p, q, j);
            a(p, q) = a(q, p) = 0.0;
            v.applyOnTheRight(p, q, j);
          }
        }
      }
    }
  }

  normalize_signs(v);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int k) { return a(i, i) > a(k, k); });

  // Tie groups are reordered by eigenvector.
  const double scale = a.diagonal().size() ? a.diagonal().cwiseAbs().maxCoeff() : 0.0;
  const double tie = 1e-12 * (1.0 + scale);
  for (int start = 0; start < n;) {
    int end = start + 1;
    while (end < n && a(idx[end - 1], idx[end - 1]) - a(idx[end], idx[end]) <= tie) ++end;
    if (end - start > 1) {
      std::stable_sort(idx.begin() + start, idx.begin() + end,
                       [&](int i, int k) { return lex_less(v.col(i), v.col(k)); });
    }
    start = end;
  }

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.values(k) = a(idx[k], idx[k]);
    out.vectors.col(k) = v.col(idx[k]);
  }
  return out;
}

double rank_cut(double scale, double rel) { return rel * std::max(1.0, scale); }

Matrix pinv(const Matrix& m, double rank_tol) {
  require_finite(m, "pinv");
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cut = rank_cut(s(0), rank_tol);
  Vector inv = Vector::Zero(s.size());
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SymMatrix pinv_sym(const SymMatrix& m, double rank_tol) {
  const int n = m.order();
  if (n == 0) return m;
  const EigenDecomposition e = eig_sym(m);
  const double scale = std::max(std::abs(e.values(0)), std::abs(e.values(n - 1)));
  const double cut = rank_cut(scale, rank_tol);
  Vector inv = Vector::Zero(n);
  for (int i = 0; i < n; ++i)
    if (std::abs(e.values(i)) > cut) inv(i) = 1.0 / e.values(i);
  return SymMatrix(e.vectors * inv.asDiagonal() * e.vectors.transpose());
}

PsdTest is_psd(const SymMatrix& m, double tol) {
  if (m.order() == 0) return {true, 0.0};
  const Vector v = eig_sym(m).values;
  const double lmin = v(v.size() - 1);
  const double nrm = std::max(std::abs(v(0)), std::abs(lmin));
  return {lmin >= -tol * (1.0 + nrm), lmin};
}

bool block_psd(const SymMatrix& a, const Matrix& b, const SymMatrix& c, double tol) {
  const int p = a.order();
  const int q = c.order();
  if (b.rows() != p || b.cols() != q) throw DimensionMismatch("block_psd: B is not p x q");
  const double scale = 1.0 + norm2(a) + norm2(b) + norm2(c);
  const double margin = tol * scale;
  if (p == 0) return is_psd(c, tol).lambda_min >= -margin;

  const EigenDecomposition e = eig_sym(a);
  if (e.values(p - 1) < -margin) return false;

  // Rotate into A's eigenbasis; directions with eigenvalue above the rank cut
  // are eliminated exactly, the rest must have B-components the Schur
  // complement can absorb.
  const double cut = rank_cut(std::max(std::abs(e.values(0)), std::abs(e.values(p - 1))));
  const Matrix bt = e.vectors.transpose() * b;
  std::vector<int> keep, null;
  for (int i = 0; i < p; ++i) (e.values(i) > cut ? keep : null).push_back(i);

  Matrix schur = c.mat();
  for (int i : keep) schur -= bt.row(i).transpose() * bt.row(i) / e.values(i);

  const int r = static_cast<int>(null.size());
  Matrix nm = Matrix::Zero(r + q, r + q);
  for (int k = 0; k < r; ++k) {
    nm(k, k) = e.values(null[k]);
    nm.block(k, r, 1, q) = bt.row(null[k]);
    nm.block(r, k, q, 1) = bt.row(null[k]).transpose();
  }
  nm.block(r, r, q, q) = schur;
  const Vector ev = eig_sym(SymMatrix(nm)).values;
  return ev.size() == 0 || ev(ev.size() - 1) >= -margin;
}

SymMatrix clip_psd(const SymMatrix& m, double rel) {
  const int n = m.order();
  if (n == 0) return m;
  EigenDecomposition e = eig_sym(m);
  const double nrm = std::max(std::abs(e.values(0)), std::abs(e.values(n - 1)));
  if (e.values(n - 1) < -rel * nrm) throw NotPositiveSemidefinite("matrix is materially indefinite");
  for (int i = 0; i < n; ++i) e.values(i) = std::max(0.0, e.values(i));
  return SymMatrix(e.vectors * e.values.asDiagonal() * e.vectors.transpose());
}

SymMatrix sqrt_psd(const SymMatrix& m) {
  const int n = m.order();
  if (n == 0) return m;
  EigenDecomposition e = eig_sym(m);
  const double nrm = std::max(std::abs(e.values(0)), std::abs(e.values(n - 1)));
  if (e.values(n - 1) < -1e-6 * nrm) throw NotPositiveSemidefinite("sqrt_psd: matrix is materially indefinite");
  for (int i = 0; i < n; ++i) e.values(i) = std::sqrt(std::max(0.0, e.values(i)));
  return SymMatrix(e.vectors * e.values.asDiagonal() * e.vectors.transpose());
}

GaussianLaw make_gaussian(const Vector& mean, const SymMatrix& cov) {
  if (mean.size() != cov.order()) throw DimensionMismatch("make_gaussian: mean/cov sizes differ");
  require_finite(mean, "make_gaussian");
  const int n = cov.order();
  if (n > 0) {
    const Vector v = eig_sym(cov).values;
    const double nrm = std::max(std::abs(v(0)), std::abs(v(n - 1)));
    if (v(n - 1) < -1e-9 * nrm) throw NotPositiveSemidefinite("make_gaussian: covariance is not PSD");
  }
  return {mean, cov};
}

Conditional gaussian_conditional(const GaussianLaw& joint, const std::vector<int>& first,
                                 const std::vector<int>& second) {
  const int d = joint.cov.order();
  for (int i : first)
    if (i < 0 || i >= d) throw DimensionMismatch("gaussian_conditional: index out of range");
  for (int i : second)
    if (i < 0 || i >= d) throw DimensionMismatch("gaussian_conditional: index out of range");
  const Matrix& s = joint.cov.mat();
  const int p = static_cast<int>(first.size());
  const int q = static_cast<int>(second.size());
  Matrix s11(p, p), s12(p, q), s22(q, q);
  Vector m1(p), m2(q);
  for (int i = 0; i < p; ++i) {
    m1(i) = joint.mean(first[i]);
    for (int j = 0; j < p; ++j) s11(i, j) = s(first[i], first[j]);
    for (int j = 0; j < q; ++j) s12(i, j) = s(first[i], second[j]);
  }
  for (int i = 0; i < q; ++i) {
    m2(i) = joint.mean(second[i]);
    for (int j = 0; j < q; ++j) s22(i, j) = s(second[i], second[j]);
  }
  Conditional out;
  out.K = s12 * pinv_sym(SymMatrix(s22)).mat();
  out.c = m1 - out.K * m2;
  out.cov = SymMatrix(s11 - out.K * s12.transpose());
  return out;
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  std::uint64_t z = seed_ + counter_ * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double t = 2.0 * M_PI * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

GaussianSampler::GaussianSampler(const GaussianLaw& law) : mean_(law.mean) {
  const int d = law.cov.order();
  factor_ = Matrix::Zero(d, d);
  if (d > 0) {
    const EigenDecomposition e = eig_sym(law.cov);
    for (int k = 0; k < d; ++k) factor_.col(k) = e.vectors.col(k) * std::sqrt(std::max(0.0, e.values(k)));
  }
  g_.resize(d);
}

void GaussianSampler::draw(CounterRng& rng, Vector& out) {
  for (int k = 0; k < g_.size(); ++k) g_(k) = rng.next_gaussian();
  out.noalias() = factor_ * g_;
  out += mean_;
}

Matrix sample_gaussian(const GaussianLaw& law, int count, std::uint64_t seed) {
  if (count < 1) throw Error("sample_gaussian: count must be positive");
  GaussianSampler sampler(law);
  CounterRng rng(seed);
  Matrix out(count, sampler.dim());
  Vector x(sampler.dim());
  for (int r = 0; r < count; ++r) {
    sampler.draw(rng, x);
    out.row(r) = x.transpose();
  }
  return out;
}

}  // namespace lqgid
