#pragma once

#include "lqgid/closedform.hpp"
#include "lqgid/structure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lqgid::cli {

// One solved grid point of a welfare problem on a named network, metrics
// taken on the orbit-averaged optimum.
struct FigurePoint {
  double beta = 0;
  double beta_d = 0;  // beta times the degree (the hub degree for stars)
  double v_p = 0, v_full = 0, gap = 0, cs_residual = 0;
  bool full_disclosure = false;  // v_p == v_full within 1e-8 relative
  bool noise_free = false;
  Metrics metrics;
  std::optional<double> s_closed_form;  // transitive common-value case only
};

struct FigureSeries {
  std::string network;  // K4, C4, star4
  double rho = 1;
  std::vector<FigurePoint> points;
  std::string file_name() const;
};

FigurePoint figure_point(const std::string& network, int n, double beta, double rho);

// K4 and C4, beta d in {-0.90, -0.85, ..., 0.30}, rho in {1, 0.5, 0}.
std::vector<FigureSeries> figure2();
// Star with n = 4, beta in {-0.55, -0.50, ..., 0.55}, rho in {1, 0.5, 0}.
std::vector<FigureSeries> figure3();

struct CutoffRow {
  std::string family;  // complete | cycle
  int n = 0;
  double closed_form = 0;  // in beta d units
  double sdp_lower = 0, sdp_upper = 0;  // grid bracket from SDP solves
  double grid_step = 0;
  int solves = 0;
};

// Complete n = 3..8, cycles n = 3..12; bracket on a beta d grid of step 0.01.
std::vector<CutoffRow> figure5();

std::string series_csv(const FigureSeries& s);
std::string cutoffs_csv(const std::vector<CutoffRow>& rows);

}  // namespace lqgid::cli
