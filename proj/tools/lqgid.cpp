// lqgid: solve, sweep and certify LQG information design scenarios.
//
// Exit status: 0 when every requested verification passes, 1 when one fails,
// 2 on bad input or a solver failure.

#include "lqgid/cli/figures.hpp"
#include "lqgid/cli/report.hpp"
#include "lqgid/cli/sweep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace lqgid;
using namespace lqgid::cli;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

fs::path out_path(const std::string& dir, const std::string& file) {
  fs::create_directories(dir);
  return fs::path(dir) / file;
}

std::string file_stem(const std::string& name) {
  std::string s = name.empty() ? "scenario" : name;
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  return s;
}

Scenario scenario_from(const std::string& path, const Overrides& o) {
  Scenario s = load_scenario(path);
  apply(o, s);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LQG information design: SDP solves, certificates, closed forms and sweeps"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".";
  Overrides o;
  int jobs = 1;
  bool resume = false;

  auto common = [&](CLI::App* sub, bool needs_scenario) {
    auto* opt = sub->add_option("--scenario", scenario_path, "scenario (or sweep) JSON file");
    if (needs_scenario) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option_function<double>("--tol-gap", [&](double v) { o.tol_gap = v; }, "SDP relative gap tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option_function<double>("--tol-feas", [&](double v) { o.tol_feas = v; }, "SDP feasibility tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { o.seed = v; }, "Monte Carlo seed");
  };

  auto* solve = app.add_subcommand("solve", "solve one scenario and write its report");
  common(solve, true);
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep to CSV");
  common(sweep, true);
  sweep->add_option("--jobs", jobs, "concurrent scenarios")->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_flag("--resume", resume, "keep completed rows of an existing CSV");
  auto* certify = app.add_subcommand("certify", "re-verify a stored solve report");
  std::string report_path;
  certify->add_option("report", report_path, "report JSON")->required()->check(CLI::ExistingFile);
  common(certify, false);
  auto* pub = app.add_subcommand("public", "optimal public information structure");
  common(pub, true);
  auto* closed = app.add_subcommand("closedform", "closed-form solutions compared with the SDP");
  common(closed, true);
  auto* sample = app.add_subcommand("sample", "Monte Carlo obedience check of the optimum");
  common(sample, true);
  long draws = 0;
  sample->add_option("--count", draws, "number of draws (overrides the scenario)")->check(CLI::PositiveNumber);
  auto* figures = app.add_subcommand("figures", "regenerate the network figure data");
  common(figures, false);
  std::vector<std::string> which{"2", "3", "5"};
  figures->add_option("--figure", which, "subset of 2, 3, 5")->check(CLI::IsMember({"2", "3", "5"}));

  CLI11_PARSE(app, argc, argv);

  try {
    bool passed = true;
    if (solve->parsed()) {
      const Scenario s = scenario_from(scenario_path, o);
      const SolveOutcome r = run_solve(s);
      passed = r.summary.passed;
      const fs::path p = out_path(out_dir, file_stem(s.name) + ".report.json");
      write_file(p, to_text(r.report));
      std::cout << s.name << ": v_p=" << format_double(r.summary.v_p) << " gap=" << format_double(r.summary.gap)
                << " cs=" << format_double(r.summary.cs_residual) << " regime=" << r.summary.regime
                << (passed ? " ok" : " FAILED") << " -> " << p.string() << "\n";
    } else if (sweep->parsed()) {
      const SweepSpec spec = parse_sweep(parse_json_text(read_file(scenario_path), scenario_path));
      const fs::path p = out_path(out_dir, file_stem(spec.name) + ".csv");
      const SweepResult r = run_sweep(spec, p.string(), jobs, resume, o);
      passed = r.failed == 0 && r.unverified == 0;
      std::cout << spec.name << ": " << r.rows << " rows (" << r.skipped << " resumed, " << r.failed << " failed, "
                << r.unverified << " unverified) -> " << p.string() << "\n";
    } else if (certify->parsed()) {
      const json report = parse_json_text(read_file(report_path), report_path);
      const json out = run_certify(report, o, passed);
      const fs::path p = out_path(out_dir, file_stem(report.value("name", "report")) + ".certify.json");
      write_file(p, to_text(out));
      std::cout << (passed ? "certified" : "NOT certified") << " -> " << p.string() << "\n";
    } else if (pub->parsed()) {
      const Scenario s = scenario_from(scenario_path, o);
      const json out = run_public(s, passed);
      const fs::path p = out_path(out_dir, file_stem(s.name) + ".public.json");
      write_file(p, to_text(out));
      std::cout << s.name << ": k*=" << out["k_star"] << " value=" << out["value"] << (passed ? " ok" : " FAILED")
                << " -> " << p.string() << "\n";
    } else if (closed->parsed()) {
      const Scenario s = scenario_from(scenario_path, o);
      const json out = run_closedform(s, passed);
      const fs::path p = out_path(out_dir, file_stem(s.name) + ".closedform.json");
      write_file(p, to_text(out));
      std::cout << s.name << ": " << (passed ? "closed forms agree" : "closed forms DISAGREE") << " -> "
                << p.string() << "\n";
    } else if (sample->parsed()) {
      Scenario s = load_scenario(scenario_path);
      if (!s.analysis.monte_carlo) s.analysis.monte_carlo = MonteCarloSpec{};
      if (draws > 0) s.analysis.monte_carlo->count = draws;
      apply(o, s);
      const json out = run_sample(s, passed);
      const fs::path p = out_path(out_dir, file_stem(s.name) + ".sample.json");
      write_file(p, to_text(out));
      std::cout << s.name << ": " << (passed ? "obedience holds" : "obedience REJECTED") << " -> " << p.string()
                << "\n";
    } else if (figures->parsed()) {
      auto has = [&](const char* f) { return std::find(which.begin(), which.end(), f) != which.end(); };
      std::vector<FigureSeries> series;
      if (has("2"))
        for (auto& s : figure2()) series.push_back(std::move(s));
      if (has("3"))
        for (auto& s : figure3()) series.push_back(std::move(s));
      for (const FigureSeries& s : series) {
        const fs::path p = out_path(out_dir, "fig" + std::string(s.network == "star4" ? "3_" : "2_") + s.file_name());
        write_file(p, series_csv(s));
        for (const FigurePoint& pt : s.points) passed = passed && pt.gap <= 1e-6 && pt.cs_residual <= 1e-6;
        std::cout << p.string() << "\n";
      }
      if (has("5")) {
        const fs::path p = out_path(out_dir, "fig5_cutoffs.csv");
        write_file(p, cutoffs_csv(figure5()));
        std::cout << p.string() << "\n";
      }
    }
    return passed ? 0 : 1;
  } catch (const SolverFailed& e) {
    std::cerr << "solver failed: " << e.what() << " (status " << to_string(e.status)
              << ", primal_eq=" << e.residuals.primal_eq << ", gap=" << e.residuals.gap << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
