#include "drnv/simplex.hpp"

#include <cmath>
#include <limits>

#include "drnv/error.hpp"

namespace drnv {

namespace {

constexpr double kEps = 1e-9;
constexpr long kMaxPivots = 1'000'000;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), t_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double rhs(std::size_t i) const { return at(i, n_); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double factor = at(i, c);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= factor * at(r, j);
    }
    basis_[r] = c;
  }

  // Maximises cost'x over the current basis, entering only `allowed` columns.
  LpStatus optimize(const std::vector<double>& cost, const std::vector<char>& allowed, long& pivots) {
    std::vector<char> in_basis(n_, 0);
    while (true) {
      std::fill(in_basis.begin(), in_basis.end(), 0);
      for (auto b : basis_) in_basis[b] = 1;
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_ && enter == n_; ++j) {
        if (!allowed[j] || in_basis[j]) continue;
        double r = cost[j];
        for (std::size_t i = 0; i < m_; ++i) r -= cost[basis_[i]] * at(i, j);
        if (r > kEps) enter = j;
      }
      if (enter == n_) return LpStatus::Optimal;

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kEps) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave == m_) return LpStatus::Unbounded;
      pivot(leave, enter);
      if (++pivots > kMaxPivots) {
        throw Error(ErrorKind::IterationBudgetExceeded, "simplex pivot budget exhausted");
      }
    }
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  const std::size_t m = lp.rows.size();

  // Rows with nonnegative right-hand sides.
  std::vector<LpRow> rows = lp.rows;
  for (auto& row : rows) {
    if (row.coeffs.size() != n) {
      throw Error(ErrorKind::InvalidArgument, "LP row width does not match the variable count");
    }
    if (row.rhs < 0.0) {
      for (auto& a : row.coeffs) a = -a;
      row.rhs = -row.rhs;
      if (row.sense == Sense::LessEq) {
        row.sense = Sense::GreaterEq;
      } else if (row.sense == Sense::GreaterEq) {
        row.sense = Sense::LessEq;
      }
    }
  }

  std::size_t slacks = 0;
  std::size_t artificials = 0;
  for (const auto& row : rows) {
    if (row.sense != Sense::Equal) ++slacks;
    if (row.sense != Sense::LessEq) ++artificials;
  }
  const std::size_t cols = n + slacks + artificials;
  Tableau tab(m, cols);
  std::vector<char> is_artificial(cols, 0);
  std::size_t next_slack = n;
  std::size_t next_art = n + slacks;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = rows[i];
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = row.coeffs[j];
    tab.rhs(i) = row.rhs;
    if (row.sense == Sense::LessEq) {
      tab.at(i, next_slack) = 1.0;
      tab.basis()[i] = next_slack++;
    } else {
      if (row.sense == Sense::GreaterEq) tab.at(i, next_slack++) = -1.0;
      tab.at(i, next_art) = 1.0;
      is_artificial[next_art] = 1;
      tab.basis()[i] = next_art++;
    }
  }

  LpSolution sol;
  std::vector<char> allowed(cols, 1);
  if (artificials > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
      if (is_artificial[j]) phase1[j] = -1.0;
    }
    tab.optimize(phase1, allowed, sol.pivots);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (is_artificial[tab.basis()[i]]) infeasibility += tab.rhs(i);
    }
    double scale = 1.0;
    for (const auto& row : rows) scale = std::max(scale, std::abs(row.rhs));
    if (infeasibility > 1e-9 * scale) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[tab.basis()[i]]) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        if (!is_artificial[j] && std::abs(tab.at(i, j)) > kEps) {
          tab.pivot(i, j);
          ++sol.pivots;
          break;
        }
      }
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (is_artificial[j]) allowed[j] = 0;
    }
  }

  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = lp.objective[j];
  if (tab.optimize(cost, allowed, sol.pivots) == LpStatus::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto b = tab.basis()[i];
    if (b < n) sol.x[b] = std::max(tab.rhs(i), 0.0);
  }
  for (std::size_t j = 0; j < n; ++j) sol.value += lp.objective[j] * sol.x[j];
  return sol;
}

}  // namespace drnv
