#pragma once

#include "lqgid/cli/report.hpp"

#include <string>
#include <vector>

namespace lqgid::cli {

struct Axis {
  std::string path;  // JSON pointer into the scenario template
  std::vector<json> values;
};

struct SweepSpec {
  std::string name;
  json scenario_template;
  std::vector<Axis> axes;
};

// {schema_version, kind: "sweep", name, template: {...}, axes: [{path, values}]}
SweepSpec parse_sweep(const json& doc);

// Cartesian product of the axes, first axis outermost.
std::vector<json> expand(const SweepSpec& spec);

struct SweepResult {
  int rows = 0;
  int skipped = 0;  // already present when resuming
  int failed = 0;
  int unverified = 0;  // solved but a requested verification failed
};

// Columns: index, scenario, beta, rho, v_p, gap, cs_residual, s_1..s_K, S_1..S_K,
// N_1..N_K, regime, v_d, v_full, status, error, then one column per axis
// (header = the axis path). K is the largest n over the grid. Rows are written
// in index order and flushed one at a time.
SweepResult run_sweep(const SweepSpec& spec, const std::string& csv_path, int jobs, bool resume,
                      const Overrides& o);

std::string format_double(double v);
std::string csv_field(const std::string& s);

}  // namespace lqgid::cli
