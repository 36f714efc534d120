#include "lqgid/cli/figures.hpp"

#include "lqgid/cli/sweep.hpp"

#include <cmath>
#include <sstream>

namespace lqgid::cli {

namespace {

constexpr double kValueTol = 1e-7;

double rel_gap(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a)); }

struct Net {
  Matrix G;
  AutomorphismGroup group;
  double degree;  // hub degree for the star
};

Net make_net(const std::string& network, int n) {
  if (network == "complete") return {complete_graph(n), n <= 8 ? symmetric_group(n) : dihedral_group(n), double(n - 1)};
  if (network == "cycle") return {cycle_graph(n), dihedral_group(n), 2.0};
  if (network == "star") return {star_graph(n), star_group(n), double(n - 1)};
  throw Error("unknown network kind " + network);
}

std::string rho_tag(double rho) {
  std::ostringstream os;
  os << rho;
  return os.str();
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

bool full_disclosure_at(const Matrix& G, double beta) {
  const int n = static_cast<int>(G.rows());
  const Environment env = welfare_environment(make_network(G, beta), common_state(n), Vector::Ones(n));
  const DesignSolution sol = solve_design(env);
  return rel_gap(sol.v_p, full_disclosure_value(env)) <= kValueTol;
}

}  // namespace

std::string FigureSeries::file_name() const { return network + "_rho" + rho_tag(rho) + ".csv"; }

FigurePoint figure_point(const std::string& network, int n, double beta, double rho) {
  const Net net = make_net(network, n);
  const SymMatrix Z = rho == 1.0 ? common_state(n) : equicorrelated_state(n, rho);
  const Environment env = welfare_environment(make_network(net.G, beta), Z, Vector::Ones(n));
  const DesignSolution sol = solve_design(env);
  // The optimum need not be unique. Averaging over the group picks the
  // invariant one, which is what the closed forms describe.
  const PrimalPoint point = symmetrize(env, sol.point, net.group);
  const Vector lambda = symmetrize(env, sol.cert.lambda, net.group);
  const OptimalityReport rep = verify_optimality(env, point, certificate(env, lambda));

  FigurePoint p;
  p.beta = beta;
  p.beta_d = beta * net.degree;
  p.v_p = value(env, point);
  p.v_full = full_disclosure_value(env);
  p.gap = rel_gap(sol.v_p, sol.v_d);
  p.cs_residual = std::max(rep.cs1_residual, rep.cs2_residual);
  p.full_disclosure = rel_gap(p.v_p, p.v_full) <= kValueTol;
  const GaussianInfoStructure gis = from_primal(env, point);
  p.noise_free = noise_freeness(gis).holds;
  p.metrics = metrics(env, gis);
  if (rho == 1.0 && network != "star") p.s_closed_form = transitive_welfare(net.G, beta, &net.group).s;
  return p;
}

std::vector<FigureSeries> figure2() {
  std::vector<FigureSeries> out;
  for (const auto& [name, kind, degree] : {std::tuple{"K4", "complete", 3.0}, std::tuple{"C4", "cycle", 2.0}})
    for (double rho : {1.0, 0.5, 0.0}) {
      FigureSeries s{name, rho, {}};
      for (int k = 0; k < 25; ++k) {
        const double bd = (-18 + k) / 20.0;
        s.points.push_back(figure_point(kind, 4, bd / degree, rho));
      }
      out.push_back(std::move(s));
    }
  return out;
}

std::vector<FigureSeries> figure3() {
  std::vector<FigureSeries> out;
  for (double rho : {1.0, 0.5, 0.0}) {
    FigureSeries s{"star4", rho, {}};
    for (int k = 0; k <= 22; ++k) s.points.push_back(figure_point("star", 4, (-11 + k) / 20.0, rho));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CutoffRow> figure5() {
  constexpr double h = 0.01;
  std::vector<CutoffRow> rows;
  auto one = [&](const std::string& family, int n) {
    const Net net = make_net(family, n);
    CutoffRow r;
    r.family = family;
    r.n = n;
    r.grid_step = h;
    r.closed_form = transitive_welfare(net.G, 0.0, &net.group).cutoff * net.degree;
    // Grid beta d = (k - 99) / 100, k = 0..99; full disclosure fails at the left
    // end and holds at 0 for every family here, so bisect on the first grid
    // point where it holds.
    int lo = 0, hi = 99;
    auto at = [&](int k) {
      ++r.solves;
      return full_disclosure_at(net.G, (k - 99) / 100.0 / net.degree);
    };
    if (at(lo) || !at(hi)) throw Error("cutoff for " + family + std::to_string(n) + " is not bracketed on (-1, 0]");
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (at(mid) ? hi : lo) = mid;
    }
    r.sdp_lower = (lo - 99) / 100.0;
    r.sdp_upper = (hi - 99) / 100.0;
    rows.push_back(r);
  };
  for (int n = 3; n <= 8; ++n) one("complete", n);
  for (int n = 3; n <= 12; ++n) one("cycle", n);
  return rows;
}

std::string series_csv(const FigureSeries& s) {
  std::string out = "beta,beta_d,agent,s,S,N,s_closed_form,full_disclosure,noise_free,v_p,v_full,gap,cs_residual\n";
  for (const FigurePoint& p : s.points) {
    const int n = static_cast<int>(p.metrics.s.size());
    // star: the hub and one leaf; transitive networks: agent 0 stands for all
    const int agents = s.network.rfind("star", 0) == 0 ? std::min(n, 2) : 1;
    for (int i = 0; i < agents; ++i) {
      out += format_double(p.beta) + ',' + format_double(p.beta_d) + ',' + std::to_string(i) + ',';
      out += opt(p.metrics.s[i]) + ',' + opt(p.metrics.S[i]) + ',' + opt(p.metrics.N[i]) + ',';
      out += opt(p.s_closed_form) + ',' + (p.full_disclosure ? "1" : "0") + ',' + (p.noise_free ? "1" : "0") + ',';
      out += format_double(p.v_p) + ',' + format_double(p.v_full) + ',' + format_double(p.gap) + ',' +
             format_double(p.cs_residual) + '\n';
    }
  }
  return out;
}

std::string cutoffs_csv(const std::vector<CutoffRow>& rows) {
  std::string out = "family,n,closed_form,sdp_lower,sdp_upper,grid_step,solves\n";
  for (const CutoffRow& r : rows)
    out += r.family + ',' + std::to_string(r.n) + ',' + format_double(r.closed_form) + ',' +
           format_double(r.sdp_lower) + ',' + format_double(r.sdp_upper) + ',' + format_double(r.grid_step) + ',' +
           std::to_string(r.solves) + '\n';
  return out;
}

}  // namespace lqgid::cli
