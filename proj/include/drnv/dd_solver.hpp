#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "drnv/kernels.hpp"
#include "drnv/model.hpp"

namespace drnv {

/// The line lambda_2 = slope * lambda_1 + intercept, along which sample
/// `sample` switches maximiser.
struct CutLine {
  std::size_t sample = 0;
  int intercept_index = 0;  // j in beta_j
  double slope = 0.0;       // 2 x_i
  double intercept = 0.0;   // beta_j

  double offset(double lambda1, double lambda2) const {
    return lambda2 - slope * lambda1 - intercept;
  }
};

struct PlaneGeometry {
  CaseClassification cls;
  std::vector<CutLine> lines;
  std::vector<Point2> vertices;  // (lambda_1, lambda_2), all with lambda_1 >= 0
};

/// Intercept indices whose lines separate distinct maximisers in a case.
std::vector<int> active_intercepts(CaseId id);

/// Cut lines for every distinct sample value and every active intercept, plus
/// their pairwise intersections and axis crossings in lambda_1 >= 0.
/// Throws NonpositiveXi when xi <= 0.
PlaneGeometry build_geometry(const ValidatedInstance& inst, double xi, double q);

struct DdOptions {
  std::size_t max_steps = 0;  // 0 selects 10 (n^2 + n)
  Exec exec = Exec::Parallel;
  bool record_path = false;
};

struct DdResult {
  double lambda1_star = 0.0;
  double lambda2_star = 0.0;
  double f_value = 0.0;
  int visited_regions = 0;
  int visited_rays = 0;
  int steps = 0;
  int box_expansions = 0;
  std::size_t region_bound = 0;  // upper bound on regions + rays of the arrangement
  std::vector<Point2> path;
  std::vector<double> path_values;

  DualPoint dual(double xi) const { return {lambda1_star, lambda2_star, xi - lambda1_star}; }
};

/// Exact minimum of F over the half-plane {lambda_1 >= 0, lambda_2} for fixed
/// (xi, Q) by region and ray descent from the best arrangement vertex.
/// Throws NonpositiveXi, IterationBudgetExceeded, or Infeasible when F is
/// unbounded below (the moment constraints cannot be met inside the ball).
DdResult dd_minimize(const ValidatedInstance& inst, double xi, double q, const DdOptions& opts = {});

/// True when no region adjacent to `at` and no ray leaving it lowers F.
bool dd_is_stationary(const ValidatedInstance& inst, double xi, double q, Point2 at);

/// JSON dump of the cut lines, vertices and (optionally) a descent path.
std::string geometry_json(const PlaneGeometry& geo, const DdResult* result = nullptr);

}  // namespace drnv
