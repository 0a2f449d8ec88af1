#include "drnv/kernels.hpp"

#include <cmath>
#include <limits>

#include <omp.h>

namespace drnv {

FEvaluator::FEvaluator(const ValidatedInstance& inst, double xi, double q)
    : inst_(&inst), xi_(xi), q_(q), cls_(classify_case(inst.costs(), xi, q)) {}

double FEvaluator::value(double lambda1, double lambda2, double lambda3) const {
  const auto& inst = *inst_;
  const auto& m = inst.moments();
  const auto& costs = inst.costs();
  double sum = 0.0;
  for (double x : inst.samples()) {
    const double b = lambda1 * x - lambda2 / 2.0;
    sum += -lambda1 * x * x + sup_g_classified(cls_, xi_, b, q_, costs).g_value;
  }
  return lambda1 * inst.delta() + lambda2 * m.mu + lambda3 * m.m2() + inst.sample_weight() * sum;
}

RegionOutcome FEvaluator::outcome(std::size_t i, double lambda1, double lambda2) const {
  const double b = lambda1 * inst_->samples()[i] - lambda2 / 2.0;
  return sup_g_classified(cls_, xi_, b, q_, inst_->costs());
}

namespace {

struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();

  void offer(double v, std::size_t i) {
    if (v < value || (v == value && i < index)) {
      value = v;
      index = i;
    }
  }
};

// Argmin over [0, count) of eval(k); ties resolve to the lowest index.
template <typename Eval>
Best reduce_min(std::size_t count, Eval&& eval, Exec exec) {
  Best best;
  if (exec == Exec::Serial) {
    for (std::size_t k = 0; k < count; ++k) best.offer(eval(k), k);
    return best;
  }
  const long n = static_cast<long>(count);
#pragma omp parallel
  {
    Best local;
#pragma omp for schedule(static) nowait
    for (long k = 0; k < n; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      local.offer(eval(idx), idx);
    }
#pragma omp critical
    best.offer(local.value, local.index);
  }
  return best;
}

}  // namespace

void evaluate_points(const FEvaluator& f, std::span<const Point2> points, std::span<double> out,
                     Exec exec) {
  const long n = static_cast<long>(points.size());
  if (exec == Exec::Serial) {
    for (long k = 0; k < n; ++k) out[k] = f(points[k].x, points[k].y);
    return;
  }
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) out[k] = f(points[k].x, points[k].y);
}

ArgMin argmin_points(const FEvaluator& f, std::span<const Point2> points, Exec exec) {
  const Best best = reduce_min(
      points.size(), [&](std::size_t k) { return f(points[k].x, points[k].y); }, exec);
  return {best.index, best.value};
}

GridScan grid_scan(const FEvaluator& f, double lo1, double hi1, std::size_t steps1, double lo2,
                   double hi2, std::size_t steps2, Exec exec) {
  const double h1 = steps1 > 1 ? (hi1 - lo1) / static_cast<double>(steps1 - 1) : 0.0;
  const double h2 = steps2 > 1 ? (hi2 - lo2) / static_cast<double>(steps2 - 1) : 0.0;
  auto at1 = [&](std::size_t i) { return i + 1 == steps1 ? hi1 : lo1 + h1 * static_cast<double>(i); };
  auto at2 = [&](std::size_t j) { return j + 1 == steps2 ? hi2 : lo2 + h2 * static_cast<double>(j); };
  const Best best = reduce_min(
      steps1 * steps2,
      [&](std::size_t k) { return f(at1(k / steps2), at2(k % steps2)); }, exec);
  GridScan out;
  out.i = best.index / steps2;
  out.j = best.index % steps2;
  out.lambda1 = at1(out.i);
  out.lambda2 = at2(out.j);
  out.value = best.value;
  return out;
}

std::pair<double, double> min_over_lambda2(const FEvaluator& f, double lambda1, double lo2, double hi2) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto at = [&](double y) { return f(lambda1, y); };
  double a = lo2, b = hi2;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = at(c), fd = at(d);
  const double tol = 1e-13 * (1.0 + std::abs(lo2) + std::abs(hi2));
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = at(d);
    }
  }
  std::pair<double, double> best{c, fc};
  if (fd < best.second) best = {d, fd};
  for (double y : {lo2, hi2}) {
    const double v = at(y);
    if (v < best.second) best = {y, v};
  }
  return best;
}

ProfileScan profile_scan(const FEvaluator& f, double lo1, double hi1, std::size_t steps, double lo2,
                         double hi2, Exec exec) {
  const double h1 = steps > 1 ? (hi1 - lo1) / static_cast<double>(steps - 1) : 0.0;
  auto at1 = [&](std::size_t i) { return i + 1 == steps ? hi1 : lo1 + h1 * static_cast<double>(i); };
  std::vector<double> arg2(steps);
  const Best best = reduce_min(
      steps,
      [&](std::size_t i) {
        const auto [y, v] = min_over_lambda2(f, at1(i), lo2, hi2);
        arg2[i] = y;
        return v;
      },
      exec);
  ProfileScan out;
  out.i = best.index;
  out.lambda1 = at1(best.index);
  out.lambda2 = arg2[best.index];
  out.value = best.value;
  return out;
}

DenseMax dense_argmax_g(double a, double b, double q, const CostParams& costs, double x_max,
                        double step, Exec exec) {
  const auto count = static_cast<std::size_t>(std::floor(x_max / step)) + 1;
  // Maximise g by minimising -g.
  const Best best = reduce_min(
      count,
      [&](std::size_t k) { return -g_objective(step * static_cast<double>(k), a, b, q, costs); },
      exec);
  return {step * static_cast<double>(best.index), -best.value};
}

}  // namespace drnv
