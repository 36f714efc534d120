#include "lqgid/cli/scenario.hpp"

#include <fstream>
#include <sstream>

namespace lqgid::cli {

namespace {

const json* find(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  const json* v = find(obj, key);
  return v ? number(*v, where + "/" + key) : fallback;
}

bool flag_or(const json& obj, const char* key, bool fallback, const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw SchemaError(where + "/" + key + ": expected true or false");
  return v->get<bool>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return j.get<int>();
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const json* v = find(obj, key);
  if (!v) throw SchemaError(where + "/" + key + ": missing");
  return *v;
}

std::string string_of(const json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected a string");
  return j.get<std::string>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw SchemaError((where.empty() ? "/" : where) + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw SchemaError(where + "/" + it.key() + ": unknown field");
  }
}

Matrix network_matrix(const NetworkInfo& net, const json& node, const std::string& where) {
  if (net.kind == "complete") return complete_graph(net.n);
  if (net.kind == "cycle") return cycle_graph(net.n);
  if (net.kind == "star") return star_graph(net.n);
  if (net.kind == "custom") return read_matrix(require(node, "adjacency", where), where + "/adjacency");
  throw SchemaError(where + "/kind: expected complete, cycle, star or custom");
}

}  // namespace

Matrix read_matrix(const json& j, const std::string& where) {
  if (j.is_object()) {
    reject_unknown(j, {"rows", "cols", "data"}, where);
    const int rows = integer(require(j, "rows", where), where + "/rows");
    const int cols = integer(require(j, "cols", where), where + "/cols");
    const json& data = require(j, "data", where);
    Matrix m = read_matrix(data, where + "/data");
    if (m.rows() != rows || m.cols() != cols) {
      if (m.size() == static_cast<Eigen::Index>(rows) * cols && (m.rows() == 1 || m.cols() == 1)) {
        Matrix out(rows, cols);
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c) out(r, c) = m.data()[r * cols + c];
        return out;
      }
      throw SchemaError(where + ": data does not match rows x cols");
    }
    return m;
  }
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a non-empty matrix");
  if (!j[0].is_array()) {
    Matrix m(1, j.size());
    for (std::size_t c = 0; c < j.size(); ++c) m(0, c) = number(j[c], where + "/" + std::to_string(c));
    return m;
  }
  const std::size_t rows = j.size(), cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rw = where + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) throw SchemaError(rw + ": ragged matrix row");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = number(j[r][c], rw + "/" + std::to_string(c));
  }
  return m;
}

Vector read_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], where + "/" + std::to_string(i));
  return v;
}

json write_matrix(const Matrix& m) {
  json data = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    data.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json write_vector(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const json doc = parse_json_text(buf.str(), path);
  try {
    return parse_scenario(doc);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

Scenario parse_scenario(const json& doc) {
  reject_unknown(doc, {"schema_version", "name", "network", "environment", "objective", "state", "analysis",
                       "tolerances", "comment"},
                 "");
  const int version = integer(require(doc, "schema_version", ""), "/schema_version");
  if (version != kSchemaVersion)
    throw SchemaError("/schema_version: unsupported version " + std::to_string(version));

  Scenario s;
  s.source = doc;
  s.name = find(doc, "name") ? string_of(doc["name"], "/name") : "scenario";

  // game
  Matrix Q, R;
  if (const json* net = find(doc, "network")) {
    if (find(doc, "environment")) throw SchemaError("/environment: give either network or environment");
    reject_unknown(*net, {"kind", "n", "beta", "adjacency"}, "/network");
    NetworkInfo info;
    info.kind = string_of(require(*net, "kind", "/network"), "/network/kind");
    info.beta = number(require(*net, "beta", "/network"), "/network/beta");
    if (info.kind == "custom") {
      info.G = network_matrix(info, *net, "/network");
      info.n = static_cast<int>(info.G.rows());
    } else {
      info.n = integer(require(*net, "n", "/network"), "/network/n");
      try {
        info.G = network_matrix(info, *net, "/network");
      } catch (const InvalidNetwork& e) {
        throw SchemaError(std::string("/network/n: ") + e.what());
      }
    }
    try {
      const NetworkSpec spec = make_network(info.G, info.beta);
      Q = Matrix::Identity(spec.n, spec.n) - spec.beta * spec.G;
      R = Matrix::Identity(spec.n, spec.n);
    } catch (const BetaOutOfRange& e) {
      throw SchemaError(std::string("/network/beta: ") + e.what());
    } catch (const InvalidNetwork& e) {
      throw SchemaError(std::string("/network: ") + e.what());
    }
    s.network = info;
  } else if (const json* e = find(doc, "environment")) {
    reject_unknown(*e, {"Q", "R"}, "/environment");
    Q = read_matrix(require(*e, "Q", "/environment"), "/environment/Q");
    R = read_matrix(require(*e, "R", "/environment"), "/environment/R");
  } else {
    throw SchemaError("/network: missing (or give /environment)");
  }
  const int n = static_cast<int>(Q.rows());
  const int m = static_cast<int>(R.cols());

  // state
  const json& st = require(doc, "state", "");
  reject_unknown(st, {"kind", "rho", "Z", "theta_mean"}, "/state");
  s.state_kind = string_of(require(st, "kind", "/state"), "/state/kind");
  Matrix Z;
  if (s.state_kind == "common") {
    Z = Matrix::Ones(m, m);
    s.rho = 1.0;
  } else if (s.state_kind == "equicorrelated") {
    s.rho = number(require(st, "rho", "/state"), "/state/rho");
    Z = equicorrelated_state(m, *s.rho).mat();
  } else if (s.state_kind == "explicit") {
    Z = read_matrix(require(st, "Z", "/state"), "/state/Z");
  } else {
    throw SchemaError("/state/kind: expected common, equicorrelated or explicit");
  }
  const Vector theta_mean = find(st, "theta_mean") ? read_vector(st["theta_mean"], "/state/theta_mean") : Vector::Zero(m);

  // objective
  const json& obj = require(doc, "objective", "");
  reject_unknown(obj, {"welfare", "V", "W"}, "/objective");
  Matrix V, W;
  if (const json* w = find(obj, "welfare")) {
    if (find(obj, "V") || find(obj, "W")) throw SchemaError("/objective: welfare excludes V and W");
    reject_unknown(*w, {"weights"}, "/objective/welfare");
    const Vector weights = find(*w, "weights") ? read_vector((*w)["weights"], "/objective/welfare/weights") : Vector::Ones(n);
    if (weights.size() != n) throw SchemaError("/objective/welfare/weights: expected length " + std::to_string(n));
    V = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) V(i, i) = weights(i) * Q(i, i);
    W = Matrix::Zero(n, m);
    s.welfare_weights = weights;
  } else {
    V = read_matrix(require(obj, "V", "/objective"), "/objective/V");
    W = find(obj, "W") ? read_matrix(obj["W"], "/objective/W") : Matrix::Zero(n, m);
  }

  try {
    s.env = make_environment(Q, R, V, W, Z, theta_mean);
  } catch (const DimensionMismatch& e) {
    throw SchemaError(std::string("/: ") + e.what());
  } catch (const Error& e) {
    throw SchemaError(std::string("/: ") + e.what());
  }

  if (const json* a = find(doc, "analysis")) {
    reject_unknown(*a, {"certify", "metrics", "symmetrize", "public", "closed_form", "monte_carlo"}, "/analysis");
    s.analysis.certify = flag_or(*a, "certify", true, "/analysis");
    s.analysis.metrics = flag_or(*a, "metrics", true, "/analysis");
    s.analysis.symmetrize = flag_or(*a, "symmetrize", false, "/analysis");
    s.analysis.public_design = flag_or(*a, "public", false, "/analysis");
    s.analysis.closed_form = flag_or(*a, "closed_form", false, "/analysis");
    if (const json* mc = find(*a, "monte_carlo")) {
      reject_unknown(*mc, {"count", "seed"}, "/analysis/monte_carlo");
      MonteCarloSpec spec;
      if (const json* c = find(*mc, "count")) spec.count = integer(*c, "/analysis/monte_carlo/count");
      if (const json* sd = find(*mc, "seed")) {
        if (!sd->is_number_integer() || (!sd->is_number_unsigned() && sd->get<std::int64_t>() < 0))
          throw SchemaError("/analysis/monte_carlo/seed: expected an unsigned integer");
        spec.seed = sd->get<std::uint64_t>();
      }
      if (spec.count < 2) throw SchemaError("/analysis/monte_carlo/count: need at least 2 draws");
      s.analysis.monte_carlo = spec;
    }
  }
  if (const json* t = find(doc, "tolerances")) {
    reject_unknown(*t, {"gap", "feas", "cs"}, "/tolerances");
    s.tol.gap = number_or(*t, "gap", s.tol.gap, "/tolerances");
    s.tol.feas = number_or(*t, "feas", s.tol.feas, "/tolerances");
    s.tol.cs = number_or(*t, "cs", s.tol.cs, "/tolerances");
    if (!(s.tol.gap > 0 && s.tol.feas > 0 && s.tol.cs > 0)) throw SchemaError("/tolerances: values must be positive");
  }
  return s;
}

std::optional<AutomorphismGroup> scenario_group(const Scenario& s) {
  if (!s.network) return std::nullopt;
  const NetworkInfo& net = *s.network;
  if (net.kind == "complete") return net.n <= 8 ? symmetric_group(net.n) : dihedral_group(net.n);
  if (net.kind == "cycle") return dihedral_group(net.n);
  if (net.kind == "star") return star_group(net.n);
  if (net.n <= 10) return automorphisms(net.G);
  return std::nullopt;
}

}  // namespace lqgid::cli
