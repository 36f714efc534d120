#pragma once

#include "lqgid/cli/scenario.hpp"
#include "lqgid/structure.hpp"

#include <optional>
#include <string>

namespace lqgid::cli {

struct Overrides {
  std::optional<double> tol_gap;
  std::optional<double> tol_feas;
  std::optional<std::uint64_t> seed;
};

void apply(const Overrides& o, Scenario& s);

// Scalars shared by the JSON report and the sweep CSV.
struct Summary {
  int n = 0;
  std::optional<double> beta, rho;
  double v_p = 0, v_d = 0, gap = 0, cs_residual = 0, v_full = 0;
  std::string regime;
  Metrics metrics;
  bool passed = false;
};

struct SolveOutcome {
  json report;
  Summary summary;
};

// Solve, certify and analyse. SolverFailed propagates with residuals attached.
SolveOutcome run_solve(const Scenario& s);

// Re-verify a stored report against its embedded scenario.
json run_certify(const json& report, const Overrides& o, bool& passed);

json run_public(const Scenario& s, bool& passed);
json run_closedform(const Scenario& s, bool& passed);
json run_sample(const Scenario& s, bool& passed);

// Two-space indented dump with trailing newline.
std::string to_text(const json& j);

}  // namespace lqgid::cli
