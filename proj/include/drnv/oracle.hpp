#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "drnv/kernels.hpp"
#include "drnv/model.hpp"

namespace drnv {

// Independent checks for the closed forms and the descent solver: dense 1-D
// maximisation of g_i, a lattice search over (lambda_1, lambda_2), and a
// discretised primal transport LP.

struct BruteResult {
  double value = 0.0;
  double argmax = 0.0;
};

/// Upper end of the scan for g_i: max(Q, x_i2, 10 (|b| + c1) / a).
double brute_x_max(double a, double b, double q, const CostParams& costs);

/// Dense scan of g_i over [0, x_max] at spacing `grid_step`, then a parabola
/// through the best lattice point and its neighbours.
/// Throws NonpositiveCurvature when a <= 0.
BruteResult brute_sup_g_ab(double a, double b, double q, const CostParams& costs, double grid_step,
                           Exec exec = Exec::Parallel);

BruteResult brute_sup_g(double sample, const DualPoint& lambda, double q, const CostParams& costs,
                        double grid_step, Exec exec = Exec::Parallel);

struct GridSpec {
  double lambda1_max = 0.0;  // 0 selects 10 max(c1, c2) / (1 + delta)
  double lambda2_max = 0.0;  // 0 selects 10 (c1 + c2) (1 + max sample)
  std::size_t steps = 400;  // lambda_1 lattice size
  int refinements = 2;
  int max_doublings = 24;
  Exec exec = Exec::Parallel;
};

struct GridResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double f_value = 0.0;
  bool boundary_incumbent = false;  // still on the outer edge after all doublings
  int doublings = 0;
  std::vector<double> pass_values;  // incumbent after the coarse pass and each refinement
};

/// Minimises F(., ., xi, Q) over a lambda_1 lattice with zooming refinement;
/// on each lattice line lambda_2 is resolved by a 1-D search over
/// [-lambda2_max, lambda2_max]. A plain 2-D lattice cannot see the thin
/// diagonal valleys F has when few samples are present.
GridResult grid_minimize(const ValidatedInstance& inst, double xi, double q, const GridSpec& spec = {});

struct SupportGrid {
  std::vector<double> points;

  /// m equally spaced points on [0, y_max].
  static SupportGrid uniform(double y_max, std::size_t m);
};

struct PrimalLpResult {
  double value = 0.0;
  std::vector<double> plan;  // row-major, samples x support points
  std::size_t rows = 0;
  std::size_t cols = 0;
  double marginal_error = 0.0;  // max |sum_j plan_ij - w_i|
};

/// Worst-case expected newsvendor loss over transport plans from the empirical
/// measure onto `grid`, within the transport budget and with both moments
/// matched up to `moment_slack`. Throws PrimalInfeasible or UnboundedLp.
PrimalLpResult primal_lp_value(const ValidatedInstance& inst, double q, const SupportGrid& grid,
                               double moment_slack);

/// Transport plan as CSV, one row per sample and one column per support point.
std::string plan_csv(const PrimalLpResult& res, const ValidatedInstance& inst, const SupportGrid& grid);

}  // namespace drnv
