// Acceptance run: one PASS/FAIL line per criterion with its wall time.
// Usage: acceptance <path to drnv binary>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "drnv/dd_solver.hpp"
#include "drnv/inner_eval.hpp"
#include "drnv/oracle.hpp"
#include "drnv/outer_solver.hpp"
#include "drnv/sweep.hpp"
#include "fixtures.hpp"

using namespace drnv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    out.pass = false;
    out.detail += " (over the " + format_g6(budget_s) + " s budget)";
  }
  if (!out.pass) ++failures;
  std::printf("%s  %d  %-34s %8.2f s  %s\n", out.pass ? "PASS" : "FAIL", id, name, secs, out.detail.c_str());
  std::fflush(stdout);
}

std::string g6(double v) { return format_g6(v); }

// Random inner tuples shared by criteria 1 and 3.
struct Tuple {
  CostParams c;
  double a, b, q;
};

std::vector<Tuple> inner_tuples() {
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Tuple> out;
  for (int k = 0; k < 1000; ++k) {
    Tuple t;
    t.c = {50 * (1 - u(rng)), 50 * (1 - u(rng))};
    t.a = std::exp(std::log(1e-2) + u(rng) * std::log(1e3));
    t.b = 100 * u(rng) - 50;
    t.q = 20 * u(rng);
    out.push_back(t);
  }
  return out;
}

// (Q, subgradient) pairs seen by the bisections of criteria 4 and 5.
std::vector<std::pair<double, double>> iterates;
double iterate_bound = 0.0;

OuterConfig observed(double bound) {
  iterate_bound = std::max(iterate_bound, bound);
  OuterConfig cfg;
  cfg.on_iterate = [](double q, double g) { iterates.emplace_back(q, g); };
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <drnv binary>\n");
    return 2;
  }
  const std::string drnv_bin = argv[1];
  const auto tuples = inner_tuples();

  criterion(1, "inner closed form vs brute force", 10, [&] {
    double worst = 0.0;
    for (const auto& t : tuples) {
      const auto closed = sup_g_classified(classify_case(t.c, t.a, t.q), t.a, t.b, t.q, t.c);
      const auto brute = brute_sup_g_ab(t.a, t.b, t.q, t.c, brute_x_max(t.a, t.b, t.q, t.c) / 2e5);
      worst = std::max(worst, std::abs(closed.g_value - brute.value) / std::max(1.0, std::abs(brute.value)));
    }
    return Outcome{worst <= 1e-6, "1000 tuples, max rel err " + g6(worst)};
  });

  criterion(2, "descent vs grid search", 60, [&] {
    std::mt19937_64 rng(2000);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const auto r = fixtures::random_instance(rng, 10);
      const auto inst = make_instance(r.samples, r.delta, r.costs);
      for (int p = 0; p < 5; ++p) {
        const double xi = std::exp(std::log(1e-2) + u(rng) * std::log(1e4));
        const double q = 25 * u(rng);
        const double dd = dd_minimize(inst, xi, q).f_value;
        const double grid = grid_minimize(inst, xi, q).f_value;
        worst = std::max(worst, std::abs(dd - grid) / (1 + std::abs(grid)));
      }
    }
    return Outcome{worst <= 1e-3, "20 instances x 5 pairs, max rel gap " + g6(worst)};
  });

  criterion(3, "case reachability audit", 0, [&] {
    int case1 = 0, case3 = 0, tested = 0;
    std::string bad;
    for (const auto& t : tuples) {
      if (!(t.q > 0.0)) continue;
      ++tested;
      const auto id = classify_case(t.c, t.a, t.q).id;
      if (id == CaseId::Case1) {
        ++case1;
      } else if (id == CaseId::Case3) {
        ++case3;
      } else if (bad.empty()) {
        bad = std::string(to_string(id)) + " at c1=" + g6(t.c.c1) + " c2=" + g6(t.c.c2) + " a=" + g6(t.a) +
              " Q=" + g6(t.q);
      }
    }
    return Outcome{case1 + case3 == tested,
                   bad.empty() ? std::to_string(case1) + " Case 1, " + std::to_string(case3) + " Case 3"
                               : "unexpected " + bad};
  });

  criterion(4, "moment-only limit at huge radius", 30, [&] {
    const MomentSpec m{10, 2};
    const CostParams c{20, 10};
    const auto inst = make_instance(fixtures::monthly_sales_48(), 1e6, c, m);
    const auto rep = solve(inst, observed(std::max(c.c1, c.c2)));
    const double eq = std::abs(rep.q_star - 10.7071) / 10.7071;
    const double ec = std::abs(rep.worst_case_cost - 28.2843) / 28.2843;
    return Outcome{eq <= 0.01 && ec <= 0.01,
                   "Q*=" + g6(rep.q_star) + " cost=" + g6(rep.worst_case_cost)};
  });

  criterion(5, "cost grows with the radius", 60, [&] {
    const auto xs = fixtures::monthly_sales_48();
    const CostParams c{20, 10};
    const auto base = make_instance(xs, 0.0, c);
    const auto [scarf_q, scarf_cost] = scarf_solution(base.moments(), c);
    // Once the ball stops binding the optimum is the limit itself, so
    // saturated rows may sit on it up to the bisection tolerance in Q and
    // rounding in the cost.
    bool ok = true;
    double prev = -INFINITY;
    std::string detail;
    for (double d : {0.0, 1.0, 2.5, 5.0, 10.0, 15.0, 20.0}) {
      const auto rep = solve(base.with_delta(d), observed(std::max(c.c1, c.c2)));
      ok &= rep.worst_case_cost >= prev;
      ok &= rep.worst_case_cost <= scarf_cost * (1 + 1e-9);
      ok &= rep.q_star <= scarf_q + rep.q_tol;
      prev = rep.worst_case_cost;
      detail += g6(d) + ":" + g6(rep.worst_case_cost) + "/" + g6(rep.q_star) + " ";
    }
    return Outcome{ok, detail + "limit " + g6(scarf_cost) + "/" + g6(scarf_q)};
  });

  criterion(6, "weak duality certificate", 120, [&] {
    bool ok = true;
    double worst_gap = 0.0, worst_excess = -INFINITY;
    for (const auto& inst : fixtures::duality_suite()) {
      const auto rep = solve(inst);
      double y_max = std::max(inst.max_sample(), rep.q_star);
      for (const auto& a : rep.worst_case_atoms) y_max = std::max(y_max, a.x);
      const auto p = primal_lp_value(inst, rep.q_star, SupportGrid::uniform(1.25 * y_max + 1.0, 200), 0.0);
      const double dual = rep.worst_case_cost;
      ok &= p.value <= dual + 1e-6;
      ok &= p.marginal_error <= 1e-9;
      const double gap = (dual - p.value) / (1 + dual);
      ok &= gap <= 5e-2;
      worst_gap = std::max(worst_gap, gap);
      worst_excess = std::max(worst_excess, p.value - dual);
    }
    return Outcome{ok, "5 instances, max primal-dual " + g6(worst_excess) + ", max rel gap " + g6(worst_gap)};
  });

  criterion(7, "profit and cost objectives agree", 0, [&] {
    std::mt19937_64 rng(7000);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double s = 0.5 + 5 * u(rng);
      const double c = s + 0.5 + 5 * u(rng);
      const double p = c + 0.5 + 5 * u(rng);
      const auto costs = profit_params_to_costs({p, c, s});
      const auto r = fixtures::random_instance(rng, 12);
      const double q = 25 * u(rng);
      double mean = 0, pi1 = 0, pi2 = 0;
      for (double x : r.samples) {
        mean += x;
        pi1 += newsvendor_loss(x, q, costs);
        pi2 += p * std::min(x, q) + s * std::max(q - x, 0.0) - c * q;
      }
      const double n = static_cast<double>(r.samples.size());
      worst = std::max(worst, std::abs(pi2 / n - ((p - c) * mean / n - pi1 / n)));
    }
    return Outcome{worst <= 1e-10, "100 draws, max abs diff " + g6(worst)};
  });

  criterion(8, "subgradient bound and finite difference", 0, [&] {
    double worst_bound = 0.0;
    for (const auto& [q, g] : iterates) worst_bound = std::max(worst_bound, std::abs(g));
    const bool bound_ok = !iterates.empty() && worst_bound <= iterate_bound + 1e-12;

    const auto inst = make_instance(fixtures::monthly_sales_48(), 2.5, {20, 10});
    const auto cfg = resolve_config(inst, {});
    std::mt19937_64 rng(8000);
    std::uniform_real_distribution<double> u(6.0, 18.0);
    double worst_fd = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double q = u(rng);
      const auto xs = minimize_xi(inst, q, cfg);
      const double g = h_subgradient(inst, q, worst_case_atoms(inst, xs.dual(), q));
      const double e = 1e-4;
      const double fd = (minimize_xi(inst, q + e, cfg).h_value - minimize_xi(inst, q - e, cfg).h_value) / (2 * e);
      worst_fd = std::max(worst_fd, std::abs(g - fd));
    }
    return Outcome{bound_ok && worst_fd <= 1e-3, std::to_string(iterates.size()) + " iterates, max |g| " +
                                                     g6(worst_bound) + ", max fd err " + g6(worst_fd)};
  });

  criterion(9, "sweep output is deterministic", 0, [&] {
    const fs::path dir = fs::temp_directory_path() / "drnv_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_samples_csv(dir / "sales.csv", fixtures::monthly_sales_48());
    std::string csv[2];
    for (int r = 0; r < 2; ++r) {
      const fs::path out = dir / ("run" + std::to_string(r));
      const std::string cmd = drnv_bin + " sweep --input " + (dir / "sales.csv").string() +
                              " --c1 20 --c2 10 --out " + out.string() + " > " + (dir / "log.txt").string() + " 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return Outcome{false, "sweep run failed"};
      csv[r] = slurp(out / "sweep.csv");
    }
    return Outcome{!csv[0].empty() && csv[0] == csv[1], std::to_string(csv[0].size()) + " bytes, identical"};
  });

  return failures == 0 ? 0 : 1;
}
