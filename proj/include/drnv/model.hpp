#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "drnv/error.hpp"

namespace drnv {

/// Underage (c1) and overage (c2) cost per unit of demand.
struct CostParams {
  double c1 = 0.0;
  double c2 = 0.0;

  double c_tilde() const { return c1 + c2; }
  bool operator==(const CostParams&) const = default;
};

/// Price-side parameterisation: sale price, unit cost and salvage value.
struct ProfitParams {
  double p = 0.0;
  double c = 0.0;
  double s = 0.0;
};

/// Target first moment and standard deviation of demand.
struct MomentSpec {
  double mu = 0.0;
  double sigma = 0.0;

  /// Second raw moment mu^2 + sigma^2.
  double m2() const { return mu * mu + sigma * sigma; }
  bool operator==(const MomentSpec&) const = default;
};

/// How the per-sample dual terms are aggregated. `Empirical` weights every
/// sample by 1/n; `Unweighted` sums them with unit weight.
enum class Weighting { Empirical, Unweighted };

struct ProblemInstance {
  std::vector<double> samples;
  double delta = 0.0;  // Wasserstein radius, squared demand units
  CostParams costs;
  MomentSpec moments;
  Weighting weighting = Weighting::Empirical;

  bool operator==(const ProblemInstance&) const = default;
};

/// A ProblemInstance whose invariants have been checked; samples are stored in
/// decreasing order. Only `validate_instance` produces one.
class ValidatedInstance {
 public:
  const ProblemInstance& instance() const { return inst_; }
  std::span<const double> samples() const { return inst_.samples; }
  std::size_t size() const { return inst_.samples.size(); }
  double delta() const { return inst_.delta; }
  const CostParams& costs() const { return inst_.costs; }
  const MomentSpec& moments() const { return inst_.moments; }
  Weighting weighting() const { return inst_.weighting; }

  /// Weight attached to every sample (1/n or 1).
  double sample_weight() const {
    return inst_.weighting == Weighting::Empirical ? 1.0 / static_cast<double>(size()) : 1.0;
  }
  double max_sample() const { return inst_.samples.front(); }
  double min_sample() const { return inst_.samples.back(); }

  /// Copy with a different radius; the rest is already validated.
  ValidatedInstance with_delta(double delta) const;

  bool operator==(const ValidatedInstance&) const = default;

 private:
  friend ValidatedInstance validate_instance(ProblemInstance inst);
  explicit ValidatedInstance(ProblemInstance inst) : inst_(std::move(inst)) {}

  ProblemInstance inst_;
};

/// Checks every instance invariant and sorts the samples in decreasing order.
/// Throws Error with NegativeSample, EmptySamples, NonpositiveCost,
/// NegativeDelta or NegativeSigma.
ValidatedInstance validate_instance(ProblemInstance inst);

/// Uniformly weighted sample mean and standard deviation.
std::pair<double, double> empirical_moments(std::span<const double> samples);

/// Builds and validates an instance; omitted moments default to the data's.
ValidatedInstance make_instance(std::vector<double> samples, double delta, CostParams costs,
                                std::optional<MomentSpec> moments = std::nullopt,
                                Weighting weighting = Weighting::Empirical);

struct DualPoint {
  double lambda1 = 0.0;  // price on the transport budget, >= 0
  double lambda2 = 0.0;  // price on the first moment
  double lambda3 = 0.0;  // price on the second raw moment

  double a() const { return lambda1 + lambda3; }
  double xi() const { return lambda1 + lambda3; }
  double b(double sample) const { return lambda1 * sample - lambda2 / 2.0; }
};

/// Which candidate maximises the per-sample inner problem: x* = 0, x* = x_i1
/// (below the order quantity) or x* = x_i2 (above it).
enum class Region { R0 = 0, R1 = 1, R2 = 2 };

enum class CaseId { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4 };

struct RegionOutcome {
  Region region = Region::R0;
  double x_star = 0.0;
  double g_value = 0.0;
  CaseId case_id = CaseId::Case1;
};

/// Probability mass placed at a demand value by the worst-case distribution.
struct Atom {
  std::size_t sample = 0;
  double x = 0.0;
  double mass = 0.0;
};

struct SolveReport {
  double q_star = 0.0;
  double worst_case_cost = 0.0;
  DualPoint dual_point;
  double xi_star = 0.0;
  std::vector<RegionOutcome> per_sample_regions;
  std::vector<Atom> worst_case_atoms;

  int bisection_steps = 0;
  long dd_calls = 0;
  double q_tol = 0.0;
  double xi_tol = 0.0;

  bool q_at_zero = false;       // subgradient nonnegative at Q = 0
  bool no_sign_change = false;  // subgradient nonpositive on the whole bracket
  bool xi_at_cap = false;       // dual value still decreasing at the largest xi probed
};

const char* to_string(Region r);
const char* to_string(CaseId c);

}  // namespace drnv
