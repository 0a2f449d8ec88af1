#include "drnv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "drnv/inner_eval.hpp"
#include "drnv/simplex.hpp"

namespace drnv {

double brute_x_max(double a, double b, double q, const CostParams& costs) {
  const double x2 = (2.0 * b + costs.c1) / (2.0 * a);
  return std::max({q, x2, 10.0 * (std::abs(b) + costs.c1) / a});
}

BruteResult brute_sup_g_ab(double a, double b, double q, const CostParams& costs, double grid_step,
                           Exec exec) {
  if (!(a > 0.0)) {
    throw Error(ErrorKind::NonpositiveCurvature, "a = " + std::to_string(a) + " must be > 0");
  }
  if (!(grid_step > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "grid step must be > 0");
  }
  const double x_max = brute_x_max(a, b, q, costs);
  const DenseMax dense = dense_argmax_g(a, b, q, costs, x_max, grid_step, exec);
  BruteResult best{dense.value, dense.x};

  // g is quadratic away from the kink at Q, so a parabola through three
  // lattice points on one side of the incumbent recovers the local maximum.
  auto g = [&](double x) { return g_objective(x, a, b, q, costs); };
  auto try_parabola = [&](double x0, double h) {
    if (x0 < 0.0 || x0 + 2.0 * h > x_max + grid_step) return;
    const double f0 = g(x0), f1 = g(x0 + h), f2 = g(x0 + 2.0 * h);
    const double curv = f0 - 2.0 * f1 + f2;
    if (!(curv < 0.0)) return;
    const double x = x0 + h + h * (f0 - f2) / (2.0 * curv);
    if (x < x0 || x > x0 + 2.0 * h) return;
    const double v = g(x);
    if (v > best.value) best = {v, x};
  };
  try_parabola(dense.x - grid_step, grid_step);
  try_parabola(dense.x - 2.0 * grid_step, grid_step);
  try_parabola(dense.x, grid_step);
  return best;
}

BruteResult brute_sup_g(double sample, const DualPoint& lambda, double q, const CostParams& costs,
                        double grid_step, Exec exec) {
  return brute_sup_g_ab(lambda.a(), lambda.b(sample), q, costs, grid_step, exec);
}

GridResult grid_minimize(const ValidatedInstance& inst, double xi, double q, const GridSpec& spec) {
  if (!(xi > 0.0)) {
    throw Error(ErrorKind::NonpositiveXi, "xi = " + std::to_string(xi) + " must be > 0");
  }
  if (spec.steps < 2) {
    throw Error(ErrorKind::InvalidArgument, "grid needs at least two steps per axis");
  }
  const auto& costs = inst.costs();
  double l1 = spec.lambda1_max > 0.0 ? spec.lambda1_max
                                     : 10.0 * std::max(costs.c1, costs.c2) / (1.0 + inst.delta());
  double l2 = spec.lambda2_max > 0.0 ? spec.lambda2_max
                                     : 10.0 * costs.c_tilde() * (1.0 + inst.max_sample());
  const FEvaluator f(inst, xi, q);
  const std::size_t steps = spec.steps;

  GridResult out;
  ProfileScan scan;
  auto on_l2_edge = [&](double y) { return std::abs(y) >= l2 * (1.0 - 1e-9); };
  while (true) {
    scan = profile_scan(f, 0.0, l1, steps, -l2, l2, spec.exec);
    const bool edge = scan.i + 1 == steps || on_l2_edge(scan.lambda2);
    if (!edge) break;
    if (out.doublings == spec.max_doublings) {
      out.boundary_incumbent = true;
      break;
    }
    l1 *= 2.0;
    l2 *= 2.0;
    ++out.doublings;
  }
  out.lambda1 = scan.lambda1;
  out.lambda2 = scan.lambda2;
  out.f_value = scan.value;
  out.pass_values.push_back(out.f_value);

  // The lambda_1 profile is convex, so the minimiser lies within one lattice
  // cell of the incumbent and each zoom keeps it.
  double w1 = l1;
  for (int pass = 0; pass < spec.refinements; ++pass) {
    w1 /= 10.0;
    const double lo1 = std::max(0.0, out.lambda1 - w1 / 2.0);
    const ProfileScan fine = profile_scan(f, lo1, lo1 + w1, steps, -l2, l2, spec.exec);
    if (fine.value < out.f_value) {
      out.lambda1 = fine.lambda1;
      out.lambda2 = fine.lambda2;
      out.f_value = fine.value;
    }
    out.pass_values.push_back(out.f_value);
  }
  return out;
}

SupportGrid SupportGrid::uniform(double y_max, std::size_t m) {
  if (m < 2 || !(y_max > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "support grid needs m >= 2 and y_max > 0");
  }
  SupportGrid grid;
  grid.points.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    grid.points[j] = y_max * static_cast<double>(j) / static_cast<double>(m - 1);
  }
  return grid;
}

PrimalLpResult primal_lp_value(const ValidatedInstance& inst, double q, const SupportGrid& grid,
                               double moment_slack) {
  const auto samples = inst.samples();
  const std::size_t n = samples.size();
  const std::size_t m = grid.points.size();
  const std::size_t vars = n * m;
  const double w = inst.sample_weight();
  const auto& mom = inst.moments();

  LinearProgram lp;
  lp.num_vars = vars;
  lp.objective.resize(vars);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      lp.objective[i * m + j] = newsvendor_loss(grid.points[j], q, inst.costs());
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    LpRow row{std::vector<double>(vars, 0.0), Sense::Equal, w};
    for (std::size_t j = 0; j < m; ++j) row.coeffs[i * m + j] = 1.0;
    lp.rows.push_back(std::move(row));
  }
  LpRow transport{std::vector<double>(vars), Sense::LessEq, inst.delta()};
  LpRow first{std::vector<double>(vars), Sense::Equal, mom.mu};
  LpRow second{std::vector<double>(vars), Sense::Equal, mom.m2()};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double y = grid.points[j];
      transport.coeffs[i * m + j] = (y - samples[i]) * (y - samples[i]);
      first.coeffs[i * m + j] = y;
      second.coeffs[i * m + j] = y * y;
    }
  }
  lp.rows.push_back(std::move(transport));
  if (moment_slack > 0.0) {
    for (LpRow* row : {&first, &second}) {
      LpRow upper = *row;
      upper.sense = Sense::LessEq;
      upper.rhs += moment_slack;
      row->sense = Sense::GreaterEq;
      row->rhs -= moment_slack;
      lp.rows.push_back(std::move(upper));
      lp.rows.push_back(std::move(*row));
    }
  } else {
    lp.rows.push_back(std::move(first));
    lp.rows.push_back(std::move(second));
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) {
    throw Error(ErrorKind::PrimalInfeasible,
                "no transport plan on the support grid meets the moment band");
  }
  if (sol.status == LpStatus::Unbounded) {
    throw Error(ErrorKind::UnboundedLp, "primal transport LP reported unbounded");
  }

  PrimalLpResult res;
  res.value = sol.value;
  res.plan = sol.x;
  res.rows = n;
  res.cols = m;
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) row_sum += res.plan[i * m + j];
    res.marginal_error = std::max(res.marginal_error, std::abs(row_sum - w));
  }
  return res;
}

std::string plan_csv(const PrimalLpResult& res, const ValidatedInstance& inst, const SupportGrid& grid) {
  std::string out = "sample";
  char buf[64];
  for (double y : grid.points) {
    std::snprintf(buf, sizeof buf, ",%.6g", y);
    out += buf;
  }
  out += '\n';
  for (std::size_t i = 0; i < res.rows; ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", inst.samples()[i]);
    out += buf;
    for (std::size_t j = 0; j < res.cols; ++j) {
      std::snprintf(buf, sizeof buf, ",%.6g", res.plan[i * res.cols + j]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace drnv
