#pragma once

#include <cstddef>
#include <vector>

namespace drnv {

/// Small dense LP solver for the verification oracles: maximise c'x subject
/// to rows a'x (<=, =, >=) b and x >= 0. Two-phase tableau simplex with
/// Bland's rule; intended for a few thousand columns and a handful of rows.
enum class Sense { LessEq, Equal, GreaterEq };

struct LpRow {
  std::vector<double> coeffs;  // dense, one entry per variable
  Sense sense = Sense::LessEq;
  double rhs = 0.0;
};

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;  // maximised
  std::vector<LpRow> rows;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  long pivots = 0;
};

LpSolution solve_lp(const LinearProgram& lp);

}  // namespace drnv
