#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "drnv/dd_solver.hpp"
#include "drnv/model.hpp"
#include "drnv/oracle.hpp"

namespace drnv {

enum class InnerMode { Dd, Grid };

/// Tolerances and brackets for the two outer loops. Zero fields are filled
/// from the instance by `resolve_config`.
struct OuterConfig {
  double xi_lo = 1e-6;
  double xi_cap = 0.0;  // largest xi probed while bracketing; 0 selects 1e7 (1 + c1 + c2)
  double xi_tol = 1e-6;
  double q_max = 0.0;   // 0 selects max sample + mu + 6 sigma
  double q_tol = 0.0;   // 0 selects 1e-5 (1 + q_max)
  int max_bisection_steps = 0;  // 0 selects ceil(log2(q_max / q_tol)) + 8

  InnerMode inner = InnerMode::Dd;
  GridSpec grid;
  Exec exec = Exec::Parallel;

  /// Called with (Q, subgradient) at every bisection iterate.
  std::function<void(double, double)> on_iterate;
};

OuterConfig resolve_config(const ValidatedInstance& inst, OuterConfig cfg);

/// f(xi, Q) and its minimiser in (lambda_1, lambda_2).
struct InnerMin {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double f_value = 0.0;
};

InnerMin evaluate_f(const ValidatedInstance& inst, double xi, double q, const OuterConfig& cfg);

struct XiSearch {
  double xi_star = 0.0;
  double h_value = 0.0;
  InnerMin inner;
  bool at_cap = false;
  int evaluations = 0;

  DualPoint dual() const { return {inner.lambda1, inner.lambda2, xi_star - inner.lambda1}; }
};

/// h(Q) = min over xi > 0 of f(xi, Q) by bracketing and golden-section search
/// in log xi. Throws Infeasible when the dual value diverges and
/// BracketExpansionFailed when no finite value is found.
XiSearch minimize_xi(const ValidatedInstance& inst, double q, const OuterConfig& cfg);

/// Worst-case distribution at a dual optimum: each sample's mass sits on its
/// maximiser; where two maximisers tie, the split is chosen to satisfy the
/// moment and transport conditions as closely as possible.
std::vector<Atom> worst_case_atoms(const ValidatedInstance& inst, const DualPoint& dual, double q);

/// Envelope derivative of h at Q: sum of mass (c2 [x < Q] - c1 [x > Q]).
double h_subgradient(const ValidatedInstance& inst, double q, std::span<const Atom> atoms);

/// Minimises h over Q >= 0 by bisection on its subgradient.
SolveReport solve(const ValidatedInstance& inst, const OuterConfig& cfg = {});

/// Moments-only robust order quantity and worst-case cost.
std::pair<double, double> scarf_solution(const MomentSpec& moments, const CostParams& costs);

/// c1 = p - c, c2 = c - s. Throws OrderingViolation unless p > c > s > 0.
CostParams profit_params_to_costs(const ProfitParams& pp);

}  // namespace drnv
