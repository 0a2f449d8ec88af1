#include "drnv/inner_eval.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "drnv/kernels.hpp"

namespace drnv {

double newsvendor_loss(double x, double q, const CostParams& costs) {
  return costs.c1 * std::max(x - q, 0.0) + costs.c2 * std::max(q - x, 0.0);
}

double g_objective(double x, double a, double b, double q, const CostParams& costs) {
  return costs.c1 * std::max(x - q, 0.0) + costs.c2 * std::max(q - x, 0.0) - a * x * x +
         2.0 * b * x;
}

CaseClassification classify_case(const CostParams& costs, double a, double q) {
  if (!(a > 0.0)) {
    throw Error(ErrorKind::NonpositiveCurvature, "a = " + std::to_string(a) + " must be > 0");
  }
  CaseClassification out;
  auto& beta = out.beta;
  beta.beta1 = costs.c1;
  beta.beta2 = -costs.c2;
  beta.beta3 = (costs.c1 - costs.c2) / 2.0 - 2.0 * a * q;
  beta.beta4 = costs.c1 - 2.0 * std::sqrt(a * costs.c_tilde() * q);

  const bool upper3 = beta.beta3 >= beta.beta2;
  const bool inside4 = beta.beta4 >= beta.beta2 && beta.beta4 <= beta.beta1;
  if (upper3 && inside4) {
    out.id = CaseId::Case1;
  } else if (!upper3 && inside4) {
    out.id = CaseId::Case2;
  } else if (!upper3) {
    out.id = CaseId::Case3;
  } else {
    out.id = CaseId::Case4;
  }
  return out;
}

namespace {

// The three candidate values, exactly as the closed form prints them.
double g0(double q, const CostParams& c) { return c.c2 * q; }

double g1(double x1, double a, double b, double q, const CostParams& c) {
  return c.c2 * (q - x1) - a * x1 * x1 + 2.0 * b * x1;
}

double g2(double x2, double a, double b, double q, const CostParams& c) {
  return c.c1 * (x2 - q) - a * x2 * x2 + 2.0 * b * x2;
}

}  // namespace

RegionOutcome sup_g_classified(const CaseClassification& cls, double a, double b, double q,
                               const CostParams& costs) {
  const double x1 = (2.0 * b - costs.c2) / (2.0 * a);
  const double x2 = (2.0 * b + costs.c1) / (2.0 * a);
  // Position of (lambda_1, lambda_2) relative to the cut lines of this sample:
  // lambda_2 - 2 x_i lambda_1 = -2 b_i.
  const double t = -2.0 * b;
  const auto& beta = cls.beta;

  Region region = Region::R0;
  switch (cls.id) {
    case CaseId::Case1:
      region = t >= beta.beta4 ? Region::R0 : Region::R2;
      break;
    case CaseId::Case2:
      if (t >= beta.beta4) {
        region = Region::R0;
      } else if (t > beta.beta2) {
        region = Region::R2;
      } else if (t >= beta.beta3) {
        region = Region::R1;
      } else {
        region = Region::R2;
      }
      break;
    case CaseId::Case3:
      // Between beta_2 and beta_1 only x = 0 is optimal: x_i1 < 0 and, with
      // beta_4 < beta_2, g_i2 < g_i0 throughout.
      if (t >= beta.beta2) {
        region = Region::R0;
      } else if (t >= beta.beta3) {
        region = Region::R1;
      } else {
        region = Region::R2;
      }
      break;
    case CaseId::Case4:
      region = t >= beta.beta1 ? Region::R0 : Region::R2;
      break;
  }

  RegionOutcome out;
  out.region = region;
  out.case_id = cls.id;
  switch (region) {
    case Region::R0:
      out.x_star = 0.0;
      out.g_value = g0(q, costs);
      break;
    case Region::R1:
      out.x_star = x1;
      out.g_value = g1(x1, a, b, q, costs);
      break;
    case Region::R2:
      out.x_star = x2;
      out.g_value = g2(x2, a, b, q, costs);
      break;
  }
  return out;
}

RegionOutcome sup_g(double sample, const DualPoint& lambda, double q, const CostParams& costs) {
  const double a = lambda.a();
  const auto cls = classify_case(costs, a, q);
  return sup_g_classified(cls, a, lambda.b(sample), q, costs);
}

double psi(double sample, const DualPoint& lambda, double q, const CostParams& costs) {
  return -lambda.lambda1 * sample * sample + sup_g(sample, lambda, q, costs).g_value;
}

std::optional<double> eval_F(const DualPoint& lambda, double q, const ValidatedInstance& inst) {
  if (!(lambda.a() > 0.0)) {
    return std::nullopt;
  }
  const FEvaluator f(inst, lambda.xi(), q);
  return f.value(lambda.lambda1, lambda.lambda2, lambda.lambda3);
}

}  // namespace drnv
