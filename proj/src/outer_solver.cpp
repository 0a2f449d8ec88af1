#include "drnv/outer_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drnv/inner_eval.hpp"
#include "drnv/simplex.hpp"

namespace drnv {

OuterConfig resolve_config(const ValidatedInstance& inst, OuterConfig cfg) {
  const auto& m = inst.moments();
  if (cfg.xi_cap <= 0.0) cfg.xi_cap = 1e7 * (1.0 + inst.costs().c_tilde());
  if (cfg.q_max <= 0.0) cfg.q_max = inst.max_sample() + std::abs(m.mu) + 6.0 * m.sigma;
  if (cfg.q_max <= 0.0) cfg.q_max = 1.0;
  if (cfg.q_tol <= 0.0) cfg.q_tol = 1e-5 * (1.0 + cfg.q_max);
  if (cfg.max_bisection_steps <= 0) {
    cfg.max_bisection_steps = static_cast<int>(std::ceil(std::log2(cfg.q_max / cfg.q_tol))) + 8;
  }
  if (!(cfg.xi_lo > 0.0) || !(cfg.xi_tol > 0.0) || !(cfg.xi_cap > cfg.xi_lo)) {
    throw Error(ErrorKind::InvalidArgument, "xi bracket and tolerance must be positive and nonempty");
  }
  return cfg;
}

InnerMin evaluate_f(const ValidatedInstance& inst, double xi, double q, const OuterConfig& cfg) {
  if (cfg.inner == InnerMode::Grid) {
    GridSpec spec = cfg.grid;
    spec.exec = cfg.exec;
    const GridResult g = grid_minimize(inst, xi, q, spec);
    return {g.lambda1, g.lambda2, g.f_value};
  }
  DdOptions opts;
  opts.exec = cfg.exec;
  const DdResult r = dd_minimize(inst, xi, q, opts);
  return {r.lambda1_star, r.lambda2_star, r.f_value};
}

XiSearch minimize_xi(const ValidatedInstance& inst, double q, const OuterConfig& config) {
  const OuterConfig cfg = resolve_config(inst, config);
  XiSearch best;
  best.h_value = std::numeric_limits<double>::infinity();
  auto eval = [&](double xi) {
    ++best.evaluations;
    const InnerMin r = evaluate_f(inst, xi, q, cfg);
    if (!std::isfinite(r.f_value)) {
      throw Error(ErrorKind::BracketExpansionFailed,
                  "f(xi, Q) is not finite at xi = " + std::to_string(xi));
    }
    if (r.f_value < best.h_value) {
      best.h_value = r.f_value;
      best.xi_star = xi;
      best.inner = r;
    }
    return r.f_value;
  };

  // Double xi until f stops decreasing; f(., Q) is convex, so the last three
  // probes bracket the minimiser.
  std::vector<double> xs{cfg.xi_lo};
  std::vector<double> fs{eval(cfg.xi_lo)};
  double lo = cfg.xi_lo;
  double hi = 2.0 * cfg.xi_lo;
  while (true) {
    const double next = 2.0 * xs.back();
    if (next > cfg.xi_cap) {
      const std::size_t k = fs.size();
      if (k >= 3) {
        const double d0 = fs[k - 3] - fs[k - 2];
        const double d1 = fs[k - 2] - fs[k - 1];
        // Divergent duals fall linearly in xi, so decrements double; a
        // feasible tail decays like 1/xi and its decrements halve. Terms of
        // F grow like xi (1 + m2 + max x^2) and cancel, so decrements below
        // that rounding scale are noise (point-mass targets sit there).
        const double scale = 1.0 + inst.moments().m2() + inst.max_sample() * inst.max_sample();
        const double noise = 1e3 * std::numeric_limits<double>::epsilon() * xs.back() * scale;
        if (d1 > 1.5 * d0 && d0 > 0.0 && d1 > std::max(1e-6 * (1.0 + std::abs(fs[k - 1])), noise)) {
          throw Error(ErrorKind::Infeasible,
                      "dual value keeps falling as xi grows: the moment targets are unreachable "
                      "within the Wasserstein ball");
        }
      }
      best.at_cap = true;
      return best;
    }
    xs.push_back(next);
    fs.push_back(eval(next));
    if (fs.back() >= fs[fs.size() - 2]) {
      hi = xs.back();
      lo = xs.size() >= 3 ? xs[xs.size() - 3] : xs.front();
      break;
    }
  }

  // Golden-section search in log xi; f is unimodal under the monotone change
  // of variable.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo);
  double b = std::log(hi);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(std::exp(c));
  double fd = eval(std::exp(d));
  while (b - a > cfg.xi_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(std::exp(d));
    }
  }
  return best;
}

namespace {

struct Candidate {
  double x = 0.0;
};

}  // namespace

std::vector<Atom> worst_case_atoms(const ValidatedInstance& inst, const DualPoint& dual, double q) {
  const auto samples = inst.samples();
  const auto& costs = inst.costs();
  const double a = dual.a();
  const double w = inst.sample_weight();
  const auto& mom = inst.moments();

  std::vector<Atom> atoms;
  struct Free {
    std::size_t sample;
    std::vector<double> xs;
  };
  std::vector<Free> free;
  double fixed_mean = 0.0, fixed_m2 = 0.0, fixed_transport = 0.0;

  const CaseClassification cls = classify_case(costs, a, q);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double b = dual.b(samples[i]);
    const RegionOutcome best = sup_g_classified(cls, a, b, q, costs);
    const double x1 = (2.0 * b - costs.c2) / (2.0 * a);
    const double x2 = (2.0 * b + costs.c1) / (2.0 * a);
    const double x_big = std::max({std::abs(x1), std::abs(x2), q});
    const double tol = 1e-9 * (1.0 + std::abs(best.g_value) + a * x_big * x_big);
    std::vector<double> tied;
    for (double x : {0.0, x1, x2}) {
      if (x < 0.0) continue;
      if (g_objective(x, a, b, q, costs) < best.g_value - tol) continue;
      const bool dup = std::any_of(tied.begin(), tied.end(), [&](double y) {
        return std::abs(y - x) <= 1e-12 * (1.0 + std::abs(x));
      });
      if (!dup) tied.push_back(x);
    }
    if (tied.size() <= 1) {
      const double x = best.x_star;
      atoms.push_back({i, x, w});
      fixed_mean += w * x;
      fixed_m2 += w * x * x;
      fixed_transport += w * (x - samples[i]) * (x - samples[i]);
    } else {
      free.push_back({i, std::move(tied)});
    }
  }
  if (free.empty()) return atoms;

  // Split tied mass to meet the stationarity conditions of the dual: both
  // moments and (when lambda_1 > 0) the full transport budget. Residuals are
  // minimised in L1 so round-off in the dual point cannot make this infeasible.
  std::size_t nvars = 0;
  for (const auto& f : free) nvars += f.xs.size();
  const std::size_t resid0 = nvars;
  nvars += 6;
  const bool budget_slack = dual.lambda1 <= 0.0;
  const std::size_t slack_var = nvars;
  if (budget_slack) ++nvars;

  LinearProgram lp;
  lp.num_vars = nvars;
  lp.objective.assign(nvars, 0.0);
  for (std::size_t k = 0; k < 6; ++k) lp.objective[resid0 + k] = -1.0;

  const double s_mean = 1.0 + std::abs(mom.mu);
  const double s_m2 = 1.0 + mom.m2();
  const double s_tr = 1.0 + inst.delta() + mom.m2();
  LpRow mean{std::vector<double>(nvars, 0.0), Sense::Equal, (mom.mu - fixed_mean) / s_mean};
  LpRow second{std::vector<double>(nvars, 0.0), Sense::Equal, (mom.m2() - fixed_m2) / s_m2};
  LpRow transport{std::vector<double>(nvars, 0.0), Sense::Equal,
                  (inst.delta() - fixed_transport) / s_tr};
  std::size_t col = 0;
  for (const auto& f : free) {
    LpRow mass{std::vector<double>(nvars, 0.0), Sense::Equal, w};
    const double xi = samples[f.sample];
    for (double x : f.xs) {
      mass.coeffs[col] = 1.0;
      mean.coeffs[col] = x / s_mean;
      second.coeffs[col] = x * x / s_m2;
      transport.coeffs[col] = (x - xi) * (x - xi) / s_tr;
      ++col;
    }
    lp.rows.push_back(std::move(mass));
  }
  LpRow* rows3[3] = {&mean, &second, &transport};
  for (std::size_t r = 0; r < 3; ++r) {
    rows3[r]->coeffs[resid0 + 2 * r] = 1.0;
    rows3[r]->coeffs[resid0 + 2 * r + 1] = -1.0;
  }
  if (budget_slack) transport.coeffs[slack_var] = 1.0;
  lp.rows.push_back(std::move(mean));
  lp.rows.push_back(std::move(second));
  lp.rows.push_back(std::move(transport));

  const LpSolution sol = solve_lp(lp);
  col = 0;
  for (const auto& f : free) {
    for (double x : f.xs) {
      const double mass = sol.status == LpStatus::Optimal ? sol.x[col] : w / static_cast<double>(f.xs.size());
      if (mass > 0.0) atoms.push_back({f.sample, x, mass});
      ++col;
    }
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) {
    return l.sample < r.sample || (l.sample == r.sample && l.x < r.x);
  });
  return atoms;
}

double h_subgradient(const ValidatedInstance& inst, double q, std::span<const Atom> atoms) {
  const auto& costs = inst.costs();
  double g = 0.0;
  for (const auto& atom : atoms) {
    if (atom.x < q) {
      g += atom.mass * costs.c2;
    } else if (atom.x > q) {
      g -= atom.mass * costs.c1;
    }
  }
  return g;
}

SolveReport solve(const ValidatedInstance& inst, const OuterConfig& config) {
  const OuterConfig cfg = resolve_config(inst, config);
  SolveReport rep;
  rep.q_tol = cfg.q_tol;
  rep.xi_tol = cfg.xi_tol;

  struct Probe {
    XiSearch xs;
    std::vector<Atom> atoms;
    double subgradient = 0.0;
  };
  auto probe = [&](double q) {
    Probe p;
    p.xs = minimize_xi(inst, q, cfg);
    rep.dd_calls += p.xs.evaluations;
    p.atoms = worst_case_atoms(inst, p.xs.dual(), q);
    p.subgradient = h_subgradient(inst, q, p.atoms);
    if (cfg.on_iterate) cfg.on_iterate(q, p.subgradient);
    return p;
  };

  double q_star = 0.0;
  Probe at = probe(0.0);
  if (at.subgradient >= 0.0) {
    rep.q_at_zero = true;
  } else {
    double lo = 0.0;
    double hi = cfg.q_max;
    Probe top = probe(hi);
    if (top.subgradient <= 0.0) {
      rep.no_sign_change = true;
      q_star = hi;
      at = std::move(top);
    } else {
      bool exact = false;
      while (hi - lo > cfg.q_tol && rep.bisection_steps < cfg.max_bisection_steps) {
        const double mid = 0.5 * (lo + hi);
        ++rep.bisection_steps;
        Probe p = probe(mid);
        if (p.subgradient > 0.0) {
          hi = mid;
        } else if (p.subgradient < 0.0) {
          lo = mid;
        } else {
          q_star = mid;
          at = std::move(p);
          exact = true;
          break;
        }
      }
      if (!exact) {
        q_star = 0.5 * (lo + hi);
        at = probe(q_star);
      }
    }
  }

  rep.q_star = q_star;
  rep.xi_star = at.xs.xi_star;
  rep.xi_at_cap = at.xs.at_cap;
  rep.dual_point = at.xs.dual();
  rep.worst_case_cost = *eval_F(rep.dual_point, q_star, inst);
  rep.worst_case_atoms = std::move(at.atoms);
  for (double x : inst.samples()) {
    rep.per_sample_regions.push_back(sup_g(x, rep.dual_point, q_star, inst.costs()));
  }
  return rep;
}

std::pair<double, double> scarf_solution(const MomentSpec& moments, const CostParams& costs) {
  const double r = std::sqrt(costs.c1 / costs.c2);
  const double q = moments.mu + moments.sigma / 2.0 * (r - 1.0 / r);
  return {q, moments.sigma * std::sqrt(costs.c1 * costs.c2)};
}

CostParams profit_params_to_costs(const ProfitParams& pp) {
  if (!(pp.p > pp.c && pp.c > pp.s && pp.s > 0.0)) {
    throw Error(ErrorKind::OrderingViolation, "profit parameters must satisfy p > c > s > 0");
  }
  return {pp.p - pp.c, pp.c - pp.s};
}

}  // namespace drnv
