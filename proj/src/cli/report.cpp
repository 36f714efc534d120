#include "lqgid/cli/report.hpp"

#include "lqgid/closedform.hpp"

#include <cmath>

namespace lqgid::cli {

void apply(const Overrides& o, Scenario& s) {
  if (o.tol_gap) s.tol.gap = *o.tol_gap;
  if (o.tol_feas) s.tol.feas = *o.tol_feas;
  if (o.seed && s.analysis.monte_carlo) s.analysis.monte_carlo->seed = *o.seed;
}

std::string to_text(const json& j) { return j.dump(2) + "\n"; }

namespace {

json optional_list(const std::vector<std::optional<double>>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(x ? json(*x) : json(nullptr));
  return out;
}

json residuals_json(const SolveResiduals& r) {
  return {{"primal_eq", r.primal_eq}, {"x_psd_violation", r.x_psd_violation},
          {"s_psd_violation", r.s_psd_violation}, {"gap", r.gap}};
}

DesignOptions design_options(const Scenario& s) {
  DesignOptions o;
  o.sdp.gap_tol = s.tol.gap;
  o.sdp.feas_tol = s.tol.feas;
  o.cs_tol = s.tol.cs;
  return o;
}

double rel_gap(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a)); }

std::string regime_of(double v_p, double v_full, double tol) {
  if (std::abs(v_p) <= tol * (1.0 + std::abs(v_p))) return "NoDisclosure";
  if (rel_gap(v_p, v_full) <= tol) return "FullDisclosure";
  return "Partial";
}

struct CompleteParams {
  double v, c;
};

std::optional<CompleteParams> complete_params(const Scenario& s) {
  if (!s.network || s.network->kind != "complete" || s.network->n < 2) return std::nullopt;
  if (s.state_kind == "explicit") return std::nullopt;
  const Environment& e = s.env;
  if (!e.W.isZero(0)) return std::nullopt;
  const double v = e.V(0, 0), c = e.V(0, 1);
  for (int i = 0; i < e.n; ++i)
    for (int j = 0; j < e.n; ++j)
      if (e.V(i, j) != (i == j ? v : c)) return std::nullopt;
  return CompleteParams{v, c};
}

bool unit_welfare(const Scenario& s) {
  return s.welfare_weights && (s.welfare_weights->array() == 1.0).all();
}

json complete_entry(const CompleteNetworkSolution& cf, const char* kind, double v_p, double tol, bool& agree) {
  const double err = rel_gap(v_p, cf.value);
  agree = agree && err <= tol;
  return {{"kind", kind},          {"regime", to_string(cf.regime)}, {"value", cf.value},
          {"sdp_value", v_p},      {"value_error", err},             {"agrees", err <= tol},
          {"x", cf.x},             {"y", cf.y},                      {"rho_x", cf.rho_x},
          {"rho_y", cf.rho_y},     {"lambda", cf.lambda},            {"s", cf.s},
          {"system_residual", cf.residual}};
}

// Closed forms that apply to this scenario, each compared with the SDP value.
json closed_forms(const Scenario& s, const DesignSolution& sol, const PrimalPoint& point, const Vector& lambda,
                  bool& agree) {
  json out = json::array();
  const double tol = s.tol.cs;
  if (const auto p = complete_params(s)) {
    const int n = s.env.n;
    const double beta = s.network->beta;
    if (s.state_kind == "common") {
      out.push_back(complete_entry(complete_common(n, beta, p->v, p->c), "complete_common", sol.v_p, tol, agree));
    } else {
      try {
        out.push_back(
            complete_entry(complete_private(n, beta, *s.rho, p->v, p->c), "complete_private", sol.v_p, tol, agree));
      } catch (const NewtonFailed&) {
        const double lam = lambda.mean();
        try {
          json e = complete_entry(complete_private(n, beta, *s.rho, p->v, p->c, complete_from_point(point, lam)),
                                  "complete_private", sol.v_p, tol, agree);
          e["seed"] = "sdp";
          out.push_back(std::move(e));
        } catch (const NewtonFailed& again) {
          out.push_back({{"kind", "complete_private"}, {"error", again.what()}, {"system_residual", again.residual},
                         {"sdp_fallback", true}, {"sdp_value", sol.v_p}});
        }
      }
    }
  }
  if (s.network && s.state_kind == "common" && unit_welfare(s)) {
    const auto group = scenario_group(s);
    if (group && is_transitive(*group)) {
      const TransitiveWelfareSolution tw = transitive_welfare(s.network->G, s.network->beta, &*group);
      const double err = rel_gap(sol.v_p, tw.value);
      agree = agree && err <= tol;
      out.push_back({{"kind", "transitive_welfare"},
                     {"full_disclosure_optimal", tw.full_disclosure_optimal},
                     {"cutoff", tw.cutoff},
                     {"cutoff_beta_d", tw.cutoff * tw.d},
                     {"value", tw.value},
                     {"sdp_value", sol.v_p},
                     {"value_error", err},
                     {"agrees", err <= tol},
                     {"s", tw.s},
                     {"lambda", tw.lambda},
                     {"x", tw.x},
                     {"y", tw.y},
                     {"d", tw.d},
                     {"mu_min", tw.mu_min}});
    }
  }
  return out;
}

json public_json(const Environment& env, const PublicDesignSolution& pd, const PublicGlobalTest& pg) {
  return {{"k_star", pd.k_star},
          {"value", pd.value},
          {"gamma", write_vector(pd.gamma)},
          {"S", write_matrix(pd.S.mat())},
          {"signal_map", write_matrix(pd.signal_map.rows() ? pd.signal_map : Matrix::Zero(0, env.m))},
          {"p_objective", pd.p_objective},
          {"k_star_bound_holds", pd.k_star_bound_holds},
          {"globally_optimal",
           {{"verdict", pg.verdict}, {"residual", pg.residual}, {"lambda", write_vector(pg.lambda)},
            {"a_lambda_min", pg.a_lambda_min}}}};
}

json mc_json(const McObedience& mc, std::uint64_t seed) {
  return {{"count", mc.count},
          {"seed", seed},
          {"moment1_z", mc.moment1_residual},
          {"moment2_z", mc.moment2_residual},
          {"foc_regression_z", mc.foc_regression_residual},
          {"band", 5.0},
          {"passed", mc.passed()}};
}

}  // namespace

SolveOutcome run_solve(const Scenario& s) {
  const Environment& env = s.env;
  const DesignSolution sol = solve_design(env, design_options(s));

  PrimalPoint point = sol.point;
  Vector lambda = sol.cert.lambda;
  bool symmetrized = false;
  if (s.analysis.symmetrize) {
    const auto group = scenario_group(s);
    if (!group) throw Error("symmetrize requested but no automorphism group is available for this scenario");
    point = symmetrize(env, point, *group);
    lambda = symmetrize(env, lambda, *group);
    symmetrized = true;
  }
  const DualCertificate cert = symmetrized ? certificate(env, lambda) : sol.cert;
  const OptimalityReport rep = symmetrized ? verify_optimality(env, point, cert, s.tol.cs) : sol.report;

  SolveOutcome out;
  Summary& sum = out.summary;
  sum.n = env.n;
  if (s.network) sum.beta = s.network->beta;
  sum.rho = s.rho;
  sum.v_p = value(env, point);
  sum.v_d = sol.v_d;
  sum.gap = rel_gap(sol.v_p, sol.v_d);
  sum.cs_residual = std::max(rep.cs1_residual, rep.cs2_residual);
  sum.v_full = full_disclosure_value(env);
  sum.regime = regime_of(sum.v_p, sum.v_full, s.tol.cs);

  json verifications = json::object();
  verifications["strong_duality"] = sum.gap <= s.tol.cs;
  json& r = out.report;
  r["schema_version"] = kSchemaVersion;
  r["kind"] = "solve_report";
  r["name"] = s.name;
  r["scenario"] = s.source;
  r["status"] = to_string(sol.status);
  r["iterations"] = sol.iterations;
  r["sdp_residuals"] = residuals_json(sol.sdp_residuals);
  r["v_p"] = sum.v_p;
  r["v_d"] = sum.v_d;
  r["gap"] = sum.gap;
  r["v_full"] = sum.v_full;
  r["v_none"] = no_disclosure_value(env);
  r["regime"] = sum.regime;
  r["symmetrized"] = symmetrized;
  r["X"] = write_matrix(point.X.mat());
  r["Y"] = write_matrix(point.Y);
  r["lambda"] = write_vector(lambda);
  if (s.analysis.certify) {
    r["certificate"] = {{"feasible", cert.feasible},    {"dual_value", cert.dual_value},
                        {"cs1_residual", rep.cs1_residual}, {"cs2_residual", rep.cs2_residual},
                        {"scale", rep.scale},            {"verdict", rep.verdict}};
    verifications["certificate"] = rep.verdict;
  }

  const GaussianInfoStructure gis = from_primal(env, point, std::max(s.tol.feas, 1e-8));
  if (s.analysis.metrics) {
    sum.metrics = metrics(env, gis);
    const ConditionalTest nf = noise_freeness(gis);
    const ConditionalTest si = state_identifiability(gis);
    r["structure"] = {{"noise_free", nf.holds},
                      {"state_identifiable", si.holds},
                      {"var_sigma_given_theta_norm", nf.conditional_cov.mat().norm()},
                      {"var_theta_given_sigma_norm", si.conditional_cov.mat().norm()}};
    r["metrics"] = {{"s", optional_list(sum.metrics.s)},
                    {"S", optional_list(sum.metrics.S)},
                    {"N", optional_list(sum.metrics.N)}};
  }

  if (s.analysis.closed_form) {
    bool agree = true;
    r["closed_form"] = closed_forms(s, sol, point, lambda, agree);
    verifications["closed_form"] = agree;
  }
  if (s.analysis.public_design) {
    const PublicDesignSolution pd = public_design(env);
    const PublicGlobalTest pg = public_globally_optimal(env, pd);
    json pj = public_json(env, pd, pg);
    const bool below = pd.value <= sum.v_p + s.tol.cs * (1.0 + std::abs(sum.v_p));
    const bool equal = rel_gap(sum.v_p, pd.value) <= s.tol.cs;
    pj["value_le_v_p"] = below;
    pj["equality_matches_verdict"] = equal == pg.verdict;
    r["public"] = std::move(pj);
    verifications["public"] = below && pd.k_star_bound_holds && equal == pg.verdict;
  }
  if (s.analysis.monte_carlo) {
    const McObedience mc = mc_obedience(env, gis, s.analysis.monte_carlo->count, s.analysis.monte_carlo->seed);
    r["monte_carlo"] = mc_json(mc, s.analysis.monte_carlo->seed);
    verifications["monte_carlo"] = mc.passed();
  }

  bool all = true;
  for (const auto& [k, v] : verifications.items()) all = all && v.get<bool>();
  r["verifications"] = verifications;
  r["passed"] = all;
  sum.passed = all;
  return out;
}

json run_certify(const json& report, const Overrides& o, bool& passed) {
  if (!report.is_object() || report.value("kind", "") != "solve_report")
    throw SchemaError("/kind: expected a solve_report");
  Scenario s = parse_scenario(report.at("scenario"));
  apply(o, s);
  const Environment& env = s.env;
  const PrimalPoint point{SymMatrix(read_matrix(report.at("X"), "/X")), read_matrix(report.at("Y"), "/Y")};
  const Vector lambda = read_vector(report.at("lambda"), "/lambda");
  if (point.X.order() != env.n || point.Y.rows() != env.n || point.Y.cols() != env.m || lambda.size() != env.n)
    throw SchemaError("/X: stored point does not match the scenario dimensions");
  const DualCertificate cert = certificate(env, lambda);
  const OptimalityReport rep = verify_optimality(env, point, cert, s.tol.cs);
  const bool feasible = is_primal_feasible(env, point, std::max(s.tol.feas, 1e-8));
  const double v = value(env, point);
  const double stored = report.at("v_p").get<double>();
  passed = rep.verdict && feasible && rel_gap(stored, v) <= s.tol.cs;
  return {{"schema_version", kSchemaVersion},
          {"kind", "certify_report"},
          {"name", s.name},
          {"primal_feasible", feasible},
          {"dual_feasible", cert.feasible},
          {"value", v},
          {"stored_v_p", stored},
          {"dual_value", cert.dual_value},
          {"cs1_residual", rep.cs1_residual},
          {"cs2_residual", rep.cs2_residual},
          {"scale", rep.scale},
          {"gap", rep.gap},
          {"verdict", rep.verdict},
          {"passed", passed}};
}

json run_public(const Scenario& s, bool& passed) {
  const PublicDesignSolution pd = public_design(s.env);
  const PublicGlobalTest pg = public_globally_optimal(s.env, pd);
  const SDPSolution lifted = solve(public_lifted_sdp(pd.C_hat));
  json out = public_json(s.env, pd, pg);
  const double err = std::abs(lifted.primal_value - pd.value);
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "public_report";
  out["name"] = s.name;
  out["lifted_sdp_value"] = lifted.primal_value;
  out["lifted_sdp_status"] = to_string(lifted.status);
  out["lifted_error"] = err;
  passed = pd.k_star_bound_holds && err <= 1e-6 * (1.0 + std::abs(pd.value));
  out["passed"] = passed;
  return out;
}

json run_closedform(const Scenario& s, bool& passed) {
  const DesignSolution sol = solve_design(s.env, design_options(s));
  PrimalPoint point = sol.point;
  Vector lambda = sol.cert.lambda;
  if (const auto group = scenario_group(s); group && s.env.m == s.env.n) {
    point = symmetrize(s.env, point, *group);
    lambda = symmetrize(s.env, lambda, *group);
  }
  bool agree = true;
  json entries = closed_forms(s, sol, point, lambda, agree);
  passed = agree && !entries.empty();
  return {{"schema_version", kSchemaVersion}, {"kind", "closedform_report"}, {"name", s.name},
          {"v_p", sol.v_p},                   {"closed_form", entries},      {"passed", passed}};
}

json run_sample(const Scenario& s, bool& passed) {
  const DesignSolution sol = solve_design(s.env, design_options(s));
  const GaussianInfoStructure gis = from_primal(s.env, sol.point, std::max(s.tol.feas, 1e-8));
  const MonteCarloSpec spec = s.analysis.monte_carlo.value_or(MonteCarloSpec{});
  const McObedience mc = mc_obedience(s.env, gis, spec.count, spec.seed);
  passed = mc.passed();
  json out = mc_json(mc, spec.seed);
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "sample_report";
  out["name"] = s.name;
  out["v_p"] = sol.v_p;
  return out;
}

}  // namespace lqgid::cli
