#include "lqgid/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lqgid {

namespace {

Permutation compose(const Permutation& a, const Permutation& b) {  // a after b
  Permutation c(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) c[i] = a[b[i]];
  return c;
}

Permutation inverse(const Permutation& p) {
  Permutation q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
  return q;
}

bool is_permutation_of(const Permutation& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int v : p) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

}  // namespace

AutomorphismGroup::AutomorphismGroup(int n, std::vector<Permutation> perms) : n_(n), perms_(std::move(perms)) {
  if (n < 1 || n > 15) throw InvalidGroup("group degree must be in [1, 15]");
  for (const auto& p : perms_)
    if (!is_permutation_of(p, n)) throw InvalidGroup("not a permutation of the right degree");
  std::sort(perms_.begin(), perms_.end());
  perms_.erase(std::unique(perms_.begin(), perms_.end()), perms_.end());

  Permutation id(n);
  std::iota(id.begin(), id.end(), 0);
  if (!contains(id)) throw InvalidGroup("identity missing");
  for (const auto& p : perms_)
    if (!contains(inverse(p))) throw InvalidGroup("set is not closed under inverse");

  std::vector<const Permutation*> right;
  if (perms_.size() <= 720) {
    for (const auto& p : perms_) right.push_back(&p);
  } else {
    const std::size_t stride = perms_.size() / 64;
    for (std::size_t k = 0; k < 64; ++k) right.push_back(&perms_[k * stride]);
  }
  for (const auto& a : perms_)
    for (const Permutation* b : right)
      if (!contains(compose(a, *b))) throw InvalidGroup("set is not closed under composition");
}

bool AutomorphismGroup::contains(const Permutation& p) const {
  return std::binary_search(perms_.begin(), perms_.end(), p);
}

bool preserves(const Matrix& G, const Permutation& p) {
  const int n = static_cast<int>(G.rows());
  if (!is_permutation_of(p, n)) return false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (G(i, j) != G(p[i], p[j])) return false;
  return true;
}

AutomorphismGroup automorphisms(const Matrix& G) {
  const int n = static_cast<int>(G.rows());
  if (G.cols() != n || n < 1) throw InvalidNetwork("adjacency matrix must be square");
  if (n > 10) throw TooLarge("exhaustive automorphism search is limited to n <= 10");
  require_finite(G, "G");

  // Sorted in/out weight multisets act as vertex invariants for pruning.
  std::vector<std::vector<double>> sig(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> out, in;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      out.push_back(G(i, j));
      in.push_back(G(j, i));
    }
    std::sort(out.begin(), out.end());
    std::sort(in.begin(), in.end());
    sig[i] = {G(i, i)};
    sig[i].insert(sig[i].end(), out.begin(), out.end());
    sig[i].insert(sig[i].end(), in.begin(), in.end());
  }

  std::vector<Permutation> found;
  Permutation p(n, -1);
  std::vector<bool> used(n, false);
  auto extend = [&](auto&& self, int i) -> void {
    if (i == n) {
      found.push_back(p);
      return;
    }
    for (int j = 0; j < n; ++j) {
      if (used[j] || sig[i] != sig[j]) continue;
      bool ok = G(i, i) == G(j, j);
      for (int k = 0; ok && k < i; ++k) ok = G(i, k) == G(j, p[k]) && G(k, i) == G(p[k], j);
      if (!ok) continue;
      p[i] = j;
      used[j] = true;
      self(self, i + 1);
      used[j] = false;
    }
    p[i] = -1;
  };
  extend(extend, 0);
  return AutomorphismGroup(n, std::move(found));
}

AutomorphismGroup symmetric_group(int n) {
  if (n < 1) throw InvalidGroup("group degree must be positive");
  if (n > 10) throw TooLarge("symmetric group enumeration is limited to n <= 10");
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> all;
  do all.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return AutomorphismGroup(n, std::move(all));
}

AutomorphismGroup dihedral_group(int n) {
  if (n < 3) throw InvalidGroup("dihedral group needs n >= 3");
  std::vector<Permutation> all;
  for (int r = 0; r < n; ++r) {
    Permutation rot(n), ref(n);
    for (int i = 0; i < n; ++i) {
      rot[i] = (i + r) % n;
      ref[i] = ((r - i) % n + n) % n;
    }
    all.push_back(rot);
    all.push_back(ref);
  }
  return AutomorphismGroup(n, std::move(all));
}

AutomorphismGroup star_group(int n) {
  if (n < 2) throw InvalidGroup("star needs n >= 2");
  if (n > 10) throw TooLarge("star group enumeration is limited to n <= 10");
  Permutation leaves(n - 1);
  std::iota(leaves.begin(), leaves.end(), 1);
  std::vector<Permutation> all;
  do {
    Permutation p(n);
    p[0] = 0;
    std::copy(leaves.begin(), leaves.end(), p.begin() + 1);
    all.push_back(p);
  } while (std::next_permutation(leaves.begin(), leaves.end()));
  return AutomorphismGroup(n, std::move(all));
}

OrbitPartition orbits(const AutomorphismGroup& group) {
  const int n = group.n();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& p : group.permutations())
    for (int i = 0; i < n; ++i) {
      const int a = find(i), b = find(p[i]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  OrbitPartition out;
  out.block_of.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (out.block_of[root] < 0) {
      out.block_of[root] = static_cast<int>(out.blocks.size());
      out.blocks.push_back({});
    }
    out.block_of[i] = out.block_of[root];
    out.blocks[out.block_of[i]].push_back(i);
  }
  return out;
}

bool is_transitive(const AutomorphismGroup& group) { return orbits(group).blocks.size() == 1; }

DegreeProfile degree_profile(const Matrix& G, double tol) {
  DegreeProfile d;
  d.out = G.rowwise().sum();
  d.in = G.colwise().sum().transpose();
  const double ref = d.out(0);
  d.regular = true;
  for (int i = 0; i < G.rows(); ++i)
    if (std::abs(d.out(i) - ref) > tol * (1.0 + std::abs(ref)) || std::abs(d.in(i) - ref) > tol * (1.0 + std::abs(ref)))
      d.regular = false;
  if (d.regular) d.d = ref;
  return d;
}

Matrix permute(const Matrix& M, const Permutation& p) {
  Matrix out(M.rows(), M.cols());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) out(p[i], p[j]) = M(i, j);
  return out;
}

Vector permute(const Vector& v, const Permutation& p) {
  Vector out(v.size());
  for (int i = 0; i < v.size(); ++i) out(p[i]) = v(i);
  return out;
}

bool invariance_check(const Matrix& M, const AutomorphismGroup& group, double tol) {
  if (M.rows() != M.cols() || M.rows() != group.n())
    throw DimensionMismatch("invariance_check: matrix order differs from group degree");
  for (const auto& p : group.permutations())
    if ((permute(M, p) - M).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

void require_invariant(const Environment& env, const AutomorphismGroup& group, double tol) {
  if (env.n != group.n()) throw DimensionMismatch("group degree differs from the number of agents");
  if (env.m != env.n) throw EnvironmentNotInvariant("states must be indexed by agents (m == n)");
  const std::pair<const char*, const Matrix*> parts[] = {
      {"Q", &env.Q}, {"R", &env.R}, {"V", &env.V.mat()}, {"W", &env.W}, {"Z", &env.Z.mat()}};
  for (const auto& [name, m] : parts)
    if (!invariance_check(*m, group, tol))
      throw EnvironmentNotInvariant(std::string(name) + " is not invariant under the group");
}

PrimalPoint symmetrize(const Environment& env, const PrimalPoint& point, const AutomorphismGroup& group) {
  require_invariant(env, group);
  Matrix x = Matrix::Zero(env.n, env.n), y = Matrix::Zero(env.n, env.m);
  for (const auto& p : group.permutations()) {
    x += permute(point.X.mat(), p);
    y += permute(point.Y, p);
  }
  const double k = group.order();
  return {SymMatrix(x / k), y / k};
}

Vector symmetrize(const Environment& env, const Vector& lambda, const AutomorphismGroup& group) {
  require_invariant(env, group);
  if (lambda.size() != env.n) throw DimensionMismatch("lambda must have length n");
  Vector out = Vector::Zero(env.n);
  for (const auto& p : group.permutations()) out += permute(lambda, p);
  return out / group.order();
}

double hoffman_bound(const Matrix& G) {
  const DegreeProfile prof = degree_profile(G);
  if (!prof.regular) throw InvalidNetwork("Hoffman bound needs a regular network");
  const double d = *prof.d;
  if (!(d > 0)) throw InvalidNetwork("Hoffman bound needs positive degree");
  const double mu_min = eig_sym(SymMatrix(G)).values(G.rows() - 1);
  if (!(mu_min < 0)) throw InvalidNetwork("Hoffman bound needs a negative smallest eigenvalue");
  return 1.0 - d / mu_min;
}

}  // namespace lqgid
