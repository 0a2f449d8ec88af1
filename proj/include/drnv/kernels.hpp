#pragma once

// Data-parallel kernels. Every kernel has a serial reference path and an
// OpenMP path selected by `Exec`; both return bit-identical results because
// reductions are resolved by (value, index) in a fixed order.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "drnv/inner_eval.hpp"
#include "drnv/model.hpp"

namespace drnv {

enum class Exec { Serial, Parallel };

/// Dual objective for a fixed curvature a = xi and order quantity Q, with the
/// case classification hoisted out of the per-sample loop.
class FEvaluator {
 public:
  FEvaluator(const ValidatedInstance& inst, double xi, double q);

  /// F at (lambda_1, lambda_2, lambda_3 = xi - lambda_1).
  double operator()(double lambda1, double lambda2) const {
    return value(lambda1, lambda2, xi_ - lambda1);
  }

  /// F at an explicit lambda_3; the curvature stays the constructor's xi.
  double value(double lambda1, double lambda2, double lambda3) const;

  /// Per-sample maximisers at (lambda_1, lambda_2).
  RegionOutcome outcome(std::size_t i, double lambda1, double lambda2) const;

  const CaseClassification& classification() const { return cls_; }
  const ValidatedInstance& instance() const { return *inst_; }
  double xi() const { return xi_; }
  double q() const { return q_; }

 private:
  const ValidatedInstance* inst_;
  double xi_;
  double q_;
  CaseClassification cls_;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct ArgMin {
  std::size_t index = 0;
  double value = 0.0;
};

/// F at every point.
void evaluate_points(const FEvaluator& f, std::span<const Point2> points, std::span<double> out,
                     Exec exec = Exec::Parallel);

/// Lowest F over the points; ties go to the lowest index. `points` must be
/// nonempty.
ArgMin argmin_points(const FEvaluator& f, std::span<const Point2> points,
                     Exec exec = Exec::Parallel);

struct GridScan {
  std::size_t i = 0;  // lambda_1 index
  std::size_t j = 0;  // lambda_2 index
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double value = 0.0;
};

/// Exhaustive scan of F over a uniform (steps1 x steps2) lattice spanning
/// [lo1, hi1] x [lo2, hi2].
GridScan grid_scan(const FEvaluator& f, double lo1, double hi1, std::size_t steps1, double lo2,
                   double hi2, std::size_t steps2, Exec exec = Exec::Parallel);

/// Golden-section minimum of the convex slice lambda_2 -> F(lambda_1, lambda_2)
/// on [lo2, hi2], endpoints included. Returns (argmin, value).
std::pair<double, double> min_over_lambda2(const FEvaluator& f, double lambda1, double lo2, double hi2);

struct ProfileScan {
  std::size_t i = 0;  // lambda_1 index
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double value = 0.0;
};

/// Lattice of `steps` lambda_1 values on [lo1, hi1]; each lattice line is
/// minimised exactly over lambda_2 in [lo2, hi2].
ProfileScan profile_scan(const FEvaluator& f, double lo1, double hi1, std::size_t steps, double lo2,
                         double hi2, Exec exec = Exec::Parallel);

struct DenseMax {
  double x = 0.0;
  double value = 0.0;
};

/// Maximum of g_i over the lattice {0, h, 2h, ...} up to x_max inclusive.
DenseMax dense_argmax_g(double a, double b, double q, const CostParams& costs, double x_max,
                        double step, Exec exec = Exec::Parallel);

}  // namespace drnv
