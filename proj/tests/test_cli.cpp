#include "lqgid/cli/figures.hpp"
#include "lqgid/cli/report.hpp"
#include "lqgid/cli/sweep.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lqgid;
using namespace lqgid::cli;
namespace fs = std::filesystem;

namespace {

json k4_doc(double rho, double beta = -0.5) {
  json d = {{"schema_version", 1},
            {"name", "k4"},
            {"network", {{"kind", "complete"}, {"n", 4}, {"beta", beta}}},
            {"objective", {{"welfare", {{"weights", {1, 1, 1, 1}}}}}},
            {"analysis", {{"symmetrize", true}}}};
  d["state"] = rho == 1.0 ? json{{"kind", "common"}} : json{{"kind", "equicorrelated"}, {"rho", rho}};
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lqgid_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("schema diagnostics") {
  json d = k4_doc(1.0);
  d["network"]["betta"] = 0.1;
  try {
    parse_scenario(d);
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("/network/betta") != std::string::npos);
  }
  d = k4_doc(1.0);
  d["schema_version"] = 2;
  CHECK_THROWS_AS(parse_scenario(d), SchemaError);
  d = k4_doc(1.0);
  d["network"]["beta"] = 0.5;  // outside (-1, 1/3)
  try {
    parse_scenario(d);
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("/network/beta") != std::string::npos);
  }
  try {
    parse_json_text("{\n  \"a\": 1,\n  \"b\": ]\n}", "x.json");
    FAIL("expected a syntax error");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("x.json:3:") != std::string::npos);
  }
}

TEST_CASE("matrix serialization") {
  Matrix m(2, 3);
  m << 1, 2.5, -3, 0.1, 1e-300, 7;
  const json j = write_matrix(m);
  CHECK(read_matrix(j, "/m") == m);
  CHECK(read_matrix(json::parse("[[1, 2], [3, 4]]"), "/m")(1, 0) == 3);
  CHECK_THROWS_AS(read_matrix(json::parse("[[1, 2], [3]]"), "/m"), SchemaError);
  CHECK_THROWS_AS(read_matrix(json::parse(R"({"rows": 2, "cols": 2, "data": [1, 2, 3]})"), "/m"), SchemaError);
}

TEST_CASE("solve reports") {
  const SolveOutcome r1 = run_solve(parse_scenario(k4_doc(1.0)));
  CHECK(r1.summary.passed);
  for (int i = 0; i < 4; ++i) {
    CHECK(*r1.summary.metrics.s[i] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(*r1.summary.metrics.S[i] == doctest::Approx(1).epsilon(1e-5));
    CHECK(*r1.summary.metrics.N[i] > 0);
  }
  CHECK(r1.report["regime"] == "Partial");

  const SolveOutcome r0 = run_solve(parse_scenario(k4_doc(0.0)));
  for (int i = 0; i < 4; ++i) CHECK(*r0.summary.metrics.N[i] <= 1e-6);
  CHECK(r0.report["structure"]["noise_free"] == true);

  const json neg = {{"schema_version", 1},
                    {"name", "neg"},
                    {"environment", {{"Q", {{1}}}, {"R", {{2}}}}},
                    {"objective", {{"V", {{-1}}}, {"W", {{0.8}}}}},
                    {"state", {{"kind", "explicit"}, {"Z", {{1}}}}}};
  // Vtilde = V + W Q / R = -0.6 < 0
  const SolveOutcome rn = run_solve(parse_scenario(neg));
  CHECK(rn.summary.regime == "NoDisclosure");
  CHECK(std::abs(rn.summary.v_p) <= 1e-7);
}

TEST_CASE("reports are deterministic and round-trip byte for byte") {
  json d = k4_doc(1.0);
  d["analysis"]["monte_carlo"] = {{"count", 20000}, {"seed", 11}};
  const std::string a = to_text(run_solve(parse_scenario(d)).report);
  const std::string b = to_text(run_solve(parse_scenario(d)).report);
  CHECK(a == b);
  CHECK(to_text(parse_json_text(a, "report")) == a);

  bool passed = false;
  const json cert = run_certify(parse_json_text(a, "report"), {}, passed);
  CHECK(passed);
  CHECK(cert["verdict"] == true);

  // tamper with the stored point
  json bad = parse_json_text(a, "report");
  bad["Y"]["data"][0][0] = bad["Y"]["data"][0][0].get<double>() * 1.2;
  run_certify(bad, {}, passed);
  CHECK_FALSE(passed);
}

TEST_CASE("sweep output, failures and resume") {
  const fs::path dir = scratch_dir("sweep");
  const json spec_doc = {{"schema_version", 1},
                         {"kind", "sweep"},
                         {"name", "grid"},
                         {"template", k4_doc(1.0)},
                         {"axes",
                          {{{"path", "/state"},
                            {"values", {{{"kind", "common"}}, {{"kind", "equicorrelated"}, {"rho", 0.5}}}}},
                           {{"path", "/network/beta"}, {"values", {-0.5, -0.1, 0.2, 0.9}}}}}};
  const SweepSpec spec = parse_sweep(spec_doc);
  CHECK(expand(spec).size() == 8);
  const fs::path csv = dir / "grid.csv";
  const SweepResult r = run_sweep(spec, csv.string(), 2, false, {});
  CHECK(r.rows == 8);
  CHECK(r.failed == 2);  // beta = 0.9 is not admissible
  const std::string full = slurp(csv);
  const auto rows = lines_of(full);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0].rfind("index,scenario,beta,rho,v_p,gap,cs_residual,s_1,", 0) == 0);
  CHECK(rows[4].find(",error,") != std::string::npos);
  for (int i = 1; i <= 8; ++i) CHECK(rows[i].rfind(std::to_string(i - 1) + ",", 0) == 0);

  // single-threaded run writes the same bytes
  const fs::path csv1 = dir / "grid1.csv";
  run_sweep(spec, csv1.string(), 1, false, {});
  CHECK(slurp(csv1) == full);

  // cut the file mid-way and resume
  {
    std::ofstream out(csv, std::ios::trunc);
    for (int i = 0; i < 4; ++i) out << rows[i] << '\n';
    out << rows[4].substr(0, 3);  // a torn row is dropped
  }
  const SweepResult again = run_sweep(spec, csv.string(), 1, true, {});
  CHECK(again.skipped == 3);
  CHECK(slurp(csv) == full);

  // resuming against a different sweep is refused
  json other = spec_doc;
  other["axes"][1]["path"] = "/network/n";
  other["axes"][1]["values"] = {4};
  CHECK_THROWS(run_sweep(parse_sweep(other), csv.string(), 1, true, {}));
}

TEST_CASE("figure emitters") {
  const FigurePoint p = figure_point("complete", 4, -0.5, 1.0);
  CHECK(*p.metrics.s[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(*p.s_closed_form == doctest::Approx(0.25));
  CHECK_FALSE(p.full_disclosure);
  FigureSeries s{"K4", 0.5, {figure_point("complete", 4, -0.1, 0.5)}};
  CHECK(s.file_name() == "K4_rho0.5.csv");
  const auto rows = lines_of(series_csv(s));
  CHECK(rows.size() == 2);
  CHECK(rows[0] == "beta,beta_d,agent,s,S,N,s_closed_form,full_disclosure,noise_free,v_p,v_full,gap,cs_residual");
  FigureSeries star{"star4", 1.0, {figure_point("star", 4, 0.2, 1.0)}};
  CHECK(lines_of(series_csv(star)).size() == 3);  // hub and a leaf
}
