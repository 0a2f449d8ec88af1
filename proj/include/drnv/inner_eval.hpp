#pragma once

#include <optional>

#include "drnv/model.hpp"

namespace drnv {

/// Lambda_2 intercepts of the cut lines lambda_2 = 2 lambda_1 x_i + beta_j.
struct Intercepts {
  double beta1 = 0.0;  // x_i2 = 0
  double beta2 = 0.0;  // x_i1 = 0
  double beta3 = 0.0;  // g_i1 = g_i2
  double beta4 = 0.0;  // g_i0 = g_i2
};

struct CaseClassification {
  CaseId id = CaseId::Case1;
  Intercepts beta;
};

/// c1 (x - Q)^+ + c2 (Q - x)^+.
double newsvendor_loss(double x, double q, const CostParams& costs);

/// The inner objective g_i(x) = c1 (x-Q)^+ + c2 (Q-x)^+ - a x^2 + 2 b x.
double g_objective(double x, double a, double b, double q, const CostParams& costs);

/// Computes the four intercepts for curvature `a` and order quantity `q` and
/// picks the case they fall in. Boundary ties resolve to Case 1 / Case 2.
/// Throws NonpositiveCurvature when a <= 0.
CaseClassification classify_case(const CostParams& costs, double a, double q);

/// Closed-form sup_{x >= 0} g_i for a sample with linear coefficient b under an
/// already classified case.
RegionOutcome sup_g_classified(const CaseClassification& cls, double a, double b, double q,
                               const CostParams& costs);

/// Closed-form sup_{x >= 0} g_i(x, lambda, Q) for one sample.
RegionOutcome sup_g(double sample, const DualPoint& lambda, double q, const CostParams& costs);

/// -lambda_1 x_i^2 + sup_x g_i.
double psi(double sample, const DualPoint& lambda, double q, const CostParams& costs);

/// The dual objective F(lambda, Q). Returns std::nullopt when a = lambda_1 +
/// lambda_3 <= 0, where the inner supremum is +infinity.
std::optional<double> eval_F(const DualPoint& lambda, double q, const ValidatedInstance& inst);

}  // namespace drnv
