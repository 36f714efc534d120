#pragma once

#include "lqgid/envmodel.hpp"
#include "lqgid/symmetry.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace lqgid::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Carries a JSON-pointer style field path, or a line number for syntax errors.
class SchemaError : public Error {
 public:
  using Error::Error;
};

struct MonteCarloSpec {
  long count = 100000;
  std::uint64_t seed = 1;
};

struct Analysis {
  bool certify = true;
  bool metrics = true;
  bool symmetrize = false;
  bool public_design = false;
  bool closed_form = false;
  std::optional<MonteCarloSpec> monte_carlo;
};

struct Tolerances {
  double gap = 1e-8;
  double feas = 1e-8;
  double cs = 1e-6;
};

struct NetworkInfo {
  std::string kind;  // complete | cycle | star | custom
  int n = 0;
  double beta = 0;
  Matrix G;
};

struct Scenario {
  std::string name;
  Environment env;
  std::optional<NetworkInfo> network;
  std::string state_kind;  // common | equicorrelated | explicit
  std::optional<double> rho;
  std::optional<Vector> welfare_weights;  // set when the objective is welfare
  Analysis analysis;
  Tolerances tol;
  json source;  // the document the scenario was read from
};

// Schema (schema_version 1):
//   name: string
//   network: {kind: complete|cycle|star|custom, n, beta, adjacency (custom)}
//     or environment: {Q, R}
//   objective: {welfare: {weights}} | {V, W}
//   state: {kind: common|equicorrelated|explicit, rho, Z, theta_mean}
//   analysis: {certify, metrics, symmetrize, public, closed_form, monte_carlo: {count, seed}}
//   tolerances: {gap, feas, cs}
// Matrices are nested row arrays or {rows, cols, data} with data row-major.
Scenario parse_scenario(const json& doc);
json parse_json_text(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::string& path);

Matrix read_matrix(const json& j, const std::string& where);
Vector read_vector(const json& j, const std::string& where);
json write_matrix(const Matrix& m);
json write_vector(const Vector& v);

// Automorphism group used for symmetrization; nullopt when none is cheap to build.
std::optional<AutomorphismGroup> scenario_group(const Scenario& s);

}  // namespace lqgid::cli
