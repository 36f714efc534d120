#include "lqgid/cli/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace lqgid::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

SweepSpec parse_sweep(const json& doc) {
  if (!doc.is_object()) throw SchemaError("/: expected an object");
  if (doc.value("schema_version", 0) != kSchemaVersion) throw SchemaError("/schema_version: expected 1");
  if (doc.value("kind", "") != "sweep") throw SchemaError("/kind: expected \"sweep\"");
  SweepSpec spec;
  spec.name = doc.value("name", "sweep");
  if (!doc.contains("template") || !doc["template"].is_object()) throw SchemaError("/template: missing object");
  spec.scenario_template = doc["template"];
  if (!doc.contains("axes") || !doc["axes"].is_array()) throw SchemaError("/axes: missing array");
  for (std::size_t k = 0; k < doc["axes"].size(); ++k) {
    const json& a = doc["axes"][k];
    const std::string where = "/axes/" + std::to_string(k);
    if (!a.is_object() || !a.contains("path") || !a["path"].is_string()) throw SchemaError(where + "/path: missing");
    if (!a.contains("values") || !a["values"].is_array() || a["values"].empty())
      throw SchemaError(where + "/values: expected a non-empty array");
    Axis axis;
    axis.path = a["path"].get<std::string>();
    try {
      (void)json::json_pointer(axis.path);
    } catch (const json::exception& e) {
      throw SchemaError(where + "/path: " + e.what());
    }
    axis.values = a["values"].get<std::vector<json>>();
    spec.axes.push_back(std::move(axis));
  }
  return spec;
}

std::vector<json> expand(const SweepSpec& spec) {
  std::vector<json> out{spec.scenario_template};
  for (const Axis& axis : spec.axes) {
    std::vector<json> next;
    for (const json& base : out)
      for (const json& v : axis.values) {
        json row = base;
        row[json::json_pointer(axis.path)] = v;
        next.push_back(std::move(row));
      }
    out = std::move(next);
  }
  return out;
}

namespace {

std::vector<std::string> header(const SweepSpec& spec, int k) {
  std::vector<std::string> h{"index", "scenario", "beta", "rho", "v_p", "gap", "cs_residual"};
  for (const char* tag : {"s_", "S_", "N_"})
    for (int i = 1; i <= k; ++i) h.push_back(tag + std::to_string(i));
  for (const char* c : {"regime", "v_d", "v_full", "status", "error"}) h.emplace_back(c);
  for (const Axis& a : spec.axes) h.push_back(a.path);
  return h;
}

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  return line;
}

// Field count of one CSV record; -1 when a quote is left open.
int field_count(const std::string& line) {
  int fields = 1;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) ++fields;
  }
  return quoted ? -1 : fields;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

struct Row {
  std::string line, status;
};

Row row_line(const SweepSpec& spec, int index, const json& doc, int k, const Overrides& o) {
  std::vector<std::string> f{std::to_string(index), spec.name + "#" + std::to_string(index)};
  std::string status = "ok", error;
  Summary sum;
  bool solved = false;
  try {
    json d = doc;
    d["name"] = f[1];
    Scenario s = parse_scenario(d);
    apply(o, s);
    sum = run_solve(s).summary;
    solved = true;
    if (!sum.passed) status = "unverified";
  } catch (const SolverFailed& e) {
    status = "solver_failed";
    error = std::string(e.what()) + " (status " + to_string(e.status) + ")";
  } catch (const std::exception& e) {
    status = "error";
    error = e.what();
  }
  if (solved) {
    f.push_back(opt(sum.beta));
    f.push_back(opt(sum.rho));
    f.push_back(format_double(sum.v_p));
    f.push_back(format_double(sum.gap));
    f.push_back(format_double(sum.cs_residual));
    for (const auto* v : {&sum.metrics.s, &sum.metrics.S, &sum.metrics.N})
      for (int i = 0; i < k; ++i) f.push_back(i < static_cast<int>(v->size()) ? opt((*v)[i]) : "");
    f.push_back(sum.regime);
    f.push_back(format_double(sum.v_d));
    f.push_back(format_double(sum.v_full));
  } else {
    f.resize(f.size() + 5 + 3 * k + 3);
  }
  f.push_back(status);
  f.push_back(error);
  for (const Axis& a : spec.axes) f.push_back(doc[json::json_pointer(a.path)].dump());
  return {join(f), status};
}

int grid_agents(const std::vector<json>& docs) {
  int k = 0;
  for (const json& d : docs) {
    try {
      k = std::max(k, parse_scenario(d).env.n);
    } catch (const std::exception&) {
      // reported on its row
    }
  }
  return k;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const std::string& csv_path, int jobs, bool resume,
                      const Overrides& o) {
  const std::vector<json> docs = expand(spec);
  const int k = grid_agents(docs);
  const std::string head = join(header(spec, k));
  const int total = static_cast<int>(docs.size());

  SweepResult result;
  result.rows = total;
  std::vector<std::string> kept;
  if (resume) {
    std::ifstream in(csv_path);
    std::string line;
    if (in && std::getline(in, line)) {
      if (line != head) throw Error(csv_path + ": header does not match this sweep, refusing to resume");
      const int width = field_count(head);
      while (std::getline(in, line)) {
        // a row torn by an interrupted write ends the usable prefix
        const std::string idx = line.substr(0, line.find(','));
        if (idx != std::to_string(kept.size()) || field_count(line) != width) break;
        kept.push_back(line);
      }
    }
  }
  const int start = std::min<int>(static_cast<int>(kept.size()), total);
  kept.resize(start);
  result.skipped = start;

  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) throw Error("cannot write " + csv_path);
  out << head << '\n';
  for (const auto& l : kept) out << l << '\n';
  out.flush();

  std::vector<std::optional<Row>> lines(total);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<int> next{start};
  auto worker = [&] {
    for (int i = next++; i < total; i = next++) {
      Row row = row_line(spec, i, docs[i], k, o);
      {
        std::lock_guard<std::mutex> lock(mu);
        lines[i] = std::move(row);
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);

  for (int i = start; i < total; ++i) {
    Row row;
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return lines[i].has_value(); });
      row = std::move(*lines[i]);
      lines[i].reset();
    }
    if (row.status == "solver_failed" || row.status == "error") ++result.failed;
    if (row.status == "unverified") ++result.unverified;
    out << row.line << '\n';
    out.flush();
  }
  for (auto& t : pool) t.join();
  return result;
}

}  // namespace lqgid::cli
