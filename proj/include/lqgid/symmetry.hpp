#pragma once

#include "lqgid/designsdp.hpp"

#include <optional>
#include <vector>

namespace lqgid {

class TooLarge : public Error {
 public:
  using Error::Error;
};

class EnvironmentNotInvariant : public Error {
 public:
  using Error::Error;
};

class InvalidGroup : public Error {
 public:
  using Error::Error;
};

using Permutation = std::vector<int>;  // i -> p[i]

// A permutation group on {0..n-1}. The constructor checks that the identity
// is present, every element has its inverse in the set and the set is closed
// under composition; for sets larger than 720 the closure check runs against
// a fixed sample of 64 right factors.
class AutomorphismGroup {
 public:
  AutomorphismGroup(int n, std::vector<Permutation> perms);

  int n() const { return n_; }
  int order() const { return static_cast<int>(perms_.size()); }
  const std::vector<Permutation>& permutations() const { return perms_; }
  bool contains(const Permutation& p) const;

 private:
  int n_;
  std::vector<Permutation> perms_;  // sorted lexicographically
};

struct OrbitPartition {
  std::vector<std::vector<int>> blocks;  // each sorted, representative = first
  std::vector<int> block_of;
};

struct DegreeProfile {
  Vector in;   // column sums
  Vector out;  // row sums
  bool regular = false;
  std::optional<double> d;
};

// Exhaustive backtracking with degree and adjacency pruning. n <= 10.
AutomorphismGroup automorphisms(const Matrix& G);

AutomorphismGroup symmetric_group(int n);
AutomorphismGroup dihedral_group(int n);
// Hub 0 fixed, leaves permuted arbitrarily.
AutomorphismGroup star_group(int n);

// True iff p preserves every entry of G.
bool preserves(const Matrix& G, const Permutation& p);

OrbitPartition orbits(const AutomorphismGroup& group);
bool is_transitive(const AutomorphismGroup& group);
DegreeProfile degree_profile(const Matrix& G, double tol = 1e-12);

// P_p M P_p^T, i.e. (out)_{p(i) p(j)} = M_{ij}.
Matrix permute(const Matrix& M, const Permutation& p);
Vector permute(const Vector& v, const Permutation& p);

// ||P M P^T - M||_inf <= tol for every group element.
bool invariance_check(const Matrix& M, const AutomorphismGroup& group, double tol = 1e-8);

// Throws EnvironmentNotInvariant unless n == m and Q, R, V, W, Z are all
// invariant (states are permuted together with agents).
void require_invariant(const Environment& env, const AutomorphismGroup& group, double tol = 1e-8);

PrimalPoint symmetrize(const Environment& env, const PrimalPoint& point, const AutomorphismGroup& group);
Vector symmetrize(const Environment& env, const Vector& lambda, const AutomorphismGroup& group);

// 1 - d / mu_min((G + G^T)/2) for a regular G with d > 0.
double hoffman_bound(const Matrix& G);

}  // namespace lqgid
