#include "lqgid/symmetry.hpp"
#include "random_env.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace lqgid;

namespace {

std::set<Permutation> brute_force_automorphisms(const Matrix& G) {
  const int n = static_cast<int>(G.rows());
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  std::set<Permutation> out;
  do {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j) ok = G(i, j) == G(p[i], p[j]);
    if (ok) out.insert(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::set<Permutation> as_set(const AutomorphismGroup& g) { return {g.permutations().begin(), g.permutations().end()}; }

Matrix cube_graph() {
  Matrix g = Matrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int b = 0; b < 3; ++b) g(i, i ^ (1 << b)) = 1;
  return g;
}

}  // namespace

TEST_CASE("automorphism groups of the named networks") {
  CHECK(automorphisms(complete_graph(4)).order() == 24);
  const AutomorphismGroup c4 = automorphisms(cycle_graph(4));
  CHECK(c4.order() == 8);
  CHECK(as_set(c4) == brute_force_automorphisms(cycle_graph(4)));
  CHECK(as_set(c4) == as_set(dihedral_group(4)));

  const OrbitPartition star = orbits(automorphisms(star_graph(4)));
  REQUIRE(star.blocks.size() == 2);
  CHECK(star.blocks[0] == std::vector<int>{0});
  CHECK(star.blocks[1] == std::vector<int>{1, 2, 3});
  CHECK(as_set(automorphisms(star_graph(5))) == as_set(star_group(5)));
  CHECK(automorphisms(cube_graph()).order() == 48);
}

TEST_CASE("automorphisms agree with brute force on random graphs") {
  std::mt19937_64 rng(19);
  std::bernoulli_distribution edge(0.4), weight(0.3);
  for (int t = 0; t < 40; ++t) {
    const int n = 2 + t % 6;
    Matrix g = Matrix::Zero(n, n);
    const bool directed = t % 3 == 0;
    for (int i = 0; i < n; ++i)
      for (int j = directed ? 0 : i + 1; j < n; ++j) {
        if (i == j || !edge(rng)) continue;
        const double w = weight(rng) ? 2.0 : 1.0;
        g(i, j) = w;
        if (!directed) g(j, i) = w;
      }
    const AutomorphismGroup a = automorphisms(g);
    CHECK(as_set(a) == brute_force_automorphisms(g));
    for (const Permutation& p : a.permutations()) CHECK(preserves(g, p));
  }
}

TEST_CASE("transitivity and degrees") {
  CHECK(is_transitive(symmetric_group(4)));
  CHECK(degree_profile(complete_graph(4)).d == 3);
  CHECK_FALSE(is_transitive(automorphisms(star_graph(4))));
  CHECK_FALSE(degree_profile(star_graph(4)).regular);
  CHECK(is_transitive(automorphisms(cycle_graph(6))));
  CHECK(degree_profile(cycle_graph(6)).d == 2);
}

TEST_CASE("group validation") {
  CHECK_THROWS_AS(AutomorphismGroup(3, {{1, 2, 0}}), InvalidGroup);             // no identity
  CHECK_THROWS_AS(AutomorphismGroup(3, {{0, 1, 2}, {1, 2, 0}}), InvalidGroup);  // inverse missing
  CHECK_THROWS_AS(AutomorphismGroup(4, {{0, 1, 2, 3}, {1, 0, 2, 3}, {0, 1, 3, 2}}), InvalidGroup);  // not closed
  CHECK_NOTHROW(AutomorphismGroup(3, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}));
  CHECK_THROWS_AS(automorphisms(cycle_graph(11)), TooLarge);
}

TEST_CASE("invariance checks") {
  CHECK(invariance_check(Matrix::Identity(5, 5), dihedral_group(5)));
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 1, 2;
  CHECK_FALSE(invariance_check(d, symmetric_group(2)));
  CHECK(invariance_check(Matrix::Constant(4, 4, 3.5), symmetric_group(4)));
  Matrix m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const Permutation p{2, 0, 1};
  const Matrix pm = permute(m, p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(pm(p[i], p[j]) == m(i, j));
}

TEST_CASE("symmetrization") {
  const NetworkSpec net = make_network(complete_graph(4), -0.5);
  const Environment env = welfare_environment(net, common_state(4), Vector::Ones(4));
  const AutomorphismGroup s4 = symmetric_group(4);
  const DesignSolution sol = solve_design(env);
  const PrimalPoint bar = symmetrize(env, sol.point, s4);
  const Matrix& x = bar.X.mat();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(x(i, j) == doctest::Approx(i == j ? x(0, 0) : x(0, 1)).epsilon(1e-12));
  CHECK(value(env, bar) == doctest::Approx(sol.v_p).epsilon(1e-9));
  CHECK(is_primal_feasible(env, bar));
  const PrimalPoint twice = symmetrize(env, bar, s4);
  CHECK((twice.X.mat() - bar.X.mat()).norm() < 1e-12);
  CHECK((twice.Y - bar.Y).norm() < 1e-12);

  const Vector lam = symmetrize(env, sol.cert.lambda, s4);
  CHECK((lam.array() - lam(0)).abs().maxCoeff() < 1e-12);
  CHECK(verify_optimality(env, bar, certificate(env, lam)).verdict);

  Environment bad = env;
  bad.V = SymMatrix(Matrix(Vector::LinSpaced(4, 1, 2).asDiagonal()));
  CHECK_THROWS_AS(require_invariant(bad, s4), EnvironmentNotInvariant);
}

TEST_CASE("symmetrization preserves value and yields orbit-constant multipliers") {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> u(0, 1);
  const std::vector<std::pair<Matrix, AutomorphismGroup>> nets{
      {cycle_graph(5), dihedral_group(5)}, {star_graph(5), star_group(5)}, {cycle_graph(6), dihedral_group(6)}};
  for (const auto& [g, group] : nets) {
    const int n = static_cast<int>(g.rows());
    const auto [lo, hi] = admissible_beta(g);
    for (int t = 0; t < 4; ++t) {
      const double beta = lo + (hi - lo) * (0.1 + 0.8 * u(rng));
      const double rho = t % 2 ? 1.0 : u(rng) * 0.9;
      const Environment env = welfare_environment(make_network(g, beta),
                                                  rho == 1.0 ? common_state(n) : equicorrelated_state(n, rho),
                                                  Vector::Ones(n));
      require_invariant(env, group);
      const DesignSolution s = solve_design(env);
      const PrimalPoint bar = symmetrize(env, s.point, group);
      CHECK(std::abs(value(env, bar) - s.v_p) <= 1e-9 * (1 + std::abs(s.v_p)));
      const Vector lam = symmetrize(env, s.cert.lambda, group);
      const OrbitPartition orb = orbits(group);
      for (const auto& block : orb.blocks)
        for (int i : block) CHECK(std::abs(lam(i) - lam(block[0])) < 1e-12);
      CHECK(verify_optimality(env, bar, certificate(env, lam)).verdict);
    }
  }
}

TEST_CASE("Hoffman bound") {
  for (int n = 2; n <= 7; ++n) CHECK(hoffman_bound(complete_graph(n)) == doctest::Approx(n).epsilon(1e-10));
  CHECK(hoffman_bound(cycle_graph(6)) == doctest::Approx(2).epsilon(1e-10));
  CHECK(hoffman_bound(cube_graph()) == doctest::Approx(2).epsilon(1e-10));
  CHECK(hoffman_bound(cycle_graph(5)) == doctest::Approx(1 - 2 / (2 * std::cos(4 * M_PI / 5))).epsilon(1e-10));
  CHECK(hoffman_bound(cycle_graph(5)) == doctest::Approx(2.2360679775).epsilon(1e-9));
  CHECK_THROWS_AS(hoffman_bound(star_graph(4)), InvalidNetwork);
}
