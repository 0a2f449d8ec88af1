#include "drnv/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace drnv {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeSample: return "NegativeSample";
    case ErrorKind::EmptySamples: return "EmptySamples";
    case ErrorKind::NonpositiveCost: return "NonpositiveCost";
    case ErrorKind::NegativeDelta: return "NegativeDelta";
    case ErrorKind::NegativeSigma: return "NegativeSigma";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonpositiveCurvature: return "NonpositiveCurvature";
    case ErrorKind::NonpositiveXi: return "NonpositiveXi";
    case ErrorKind::IterationBudgetExceeded: return "IterationBudgetExceeded";
    case ErrorKind::BracketExpansionFailed: return "BracketExpansionFailed";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::OrderingViolation: return "OrderingViolation";
    case ErrorKind::PrimalInfeasible: return "PrimalInfeasible";
    case ErrorKind::UnboundedLp: return "UnboundedLp";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

const char* to_string(Region r) {
  switch (r) {
    case Region::R0: return "R0";
    case Region::R1: return "R1";
    case Region::R2: return "R2";
  }
  return "?";
}

const char* to_string(CaseId c) {
  switch (c) {
    case CaseId::Case1: return "Case1";
    case CaseId::Case2: return "Case2";
    case CaseId::Case3: return "Case3";
    case CaseId::Case4: return "Case4";
  }
  return "?";
}

ValidatedInstance validate_instance(ProblemInstance inst) {
  if (inst.samples.empty()) {
    throw Error(ErrorKind::EmptySamples, "at least one demand sample is required");
  }
  for (std::size_t i = 0; i < inst.samples.size(); ++i) {
    const double x = inst.samples[i];
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorKind::NegativeSample,
                  "sample " + std::to_string(i) + " = " + std::to_string(x) + " is not >= 0");
    }
  }
  const auto& c = inst.costs;
  if (!(c.c1 > 0.0) || !(c.c2 > 0.0) || !std::isfinite(c.c1) || !std::isfinite(c.c2)) {
    throw Error(ErrorKind::NonpositiveCost, "c1 and c2 must be finite and > 0");
  }
  if (!(inst.delta >= 0.0)) {
    throw Error(ErrorKind::NegativeDelta, "delta must be >= 0");
  }
  if (!(inst.moments.sigma >= 0.0) || !std::isfinite(inst.moments.sigma)) {
    throw Error(ErrorKind::NegativeSigma, "sigma must be >= 0");
  }
  if (!std::isfinite(inst.moments.mu)) {
    throw Error(ErrorKind::InvalidArgument, "mu must be finite");
  }
  std::sort(inst.samples.begin(), inst.samples.end(), std::greater<>());
  return ValidatedInstance(std::move(inst));
}

ValidatedInstance ValidatedInstance::with_delta(double delta) const {
  ProblemInstance copy = inst_;
  copy.delta = delta;
  return validate_instance(std::move(copy));
}

std::pair<double, double> empirical_moments(std::span<const double> samples) {
  if (samples.empty()) {
    throw Error(ErrorKind::EmptySamples, "empirical moments of an empty sample");
  }
  if (std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples.front(); })) {
    return {samples.front(), 0.0};
  }
  const double w = 1.0 / static_cast<double>(samples.size());
  double mean = 0.0;
  double second = 0.0;
  for (double x : samples) {
    mean += w * x;
    second += w * x * x;
  }
  // Round-off can leave a tiny negative variance.
  const double var = std::max(0.0, second - mean * mean);
  return {mean, std::sqrt(var)};
}

ValidatedInstance make_instance(std::vector<double> samples, double delta, CostParams costs,
                                std::optional<MomentSpec> moments, Weighting weighting) {
  ProblemInstance inst;
  inst.samples = std::move(samples);
  inst.delta = delta;
  inst.costs = costs;
  inst.weighting = weighting;
  if (moments) {
    inst.moments = *moments;
  } else if (!inst.samples.empty()) {
    auto [mu, sigma] = empirical_moments(inst.samples);
    inst.moments = MomentSpec{mu, sigma};
  }
  return validate_instance(std::move(inst));
}

}  // namespace drnv
