#pragma once

#include <stdexcept>
#include <string>

namespace drnv {

enum class ErrorKind {
  NegativeSample,
  EmptySamples,
  NonpositiveCost,
  NegativeDelta,
  NegativeSigma,
  InvalidArgument,
  NonpositiveCurvature,
  NonpositiveXi,
  IterationBudgetExceeded,
  BracketExpansionFailed,
  Infeasible,
  OrderingViolation,
  PrimalInfeasible,
  UnboundedLp,
  ParseError,
  EmptyFile,
  IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace drnv
