// Command-line front end: solve, sweep, verify, scarf, primal-check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "drnv/dd_solver.hpp"
#include "drnv/inner_eval.hpp"
#include "drnv/oracle.hpp"
#include "drnv/outer_solver.hpp"
#include "drnv/sweep.hpp"

using namespace drnv;

namespace {

struct Flags {
  std::string input, config, delta, mode, out, weighting;
  double c1 = 0, c2 = 0, p = 0, c = 0, s = 0, mu = 0, sigma = 0;
  bool verify = false, timing = false;
  int workers = 1;
  CLI::Option *o_c1, *o_c2, *o_p, *o_c, *o_s, *o_mu, *o_sigma, *o_delta, *o_mode, *o_out, *o_workers,
      *o_weighting, *o_input;
};

void add_common(CLI::App* sub, Flags& f) {
  f.o_input = sub->add_option("--input", f.input, "demand CSV (one value per line, or period,value)");
  sub->add_option("--config", f.config, "JSON config; flags override its keys");
  f.o_c1 = sub->add_option("--c1", f.c1, "underage cost per unit");
  f.o_c2 = sub->add_option("--c2", f.c2, "overage cost per unit");
  f.o_p = sub->add_option("--p", f.p, "selling price");
  f.o_c = sub->add_option("--c", f.c, "unit cost");
  f.o_s = sub->add_option("--s", f.s, "salvage value");
  f.o_mu = sub->add_option("--mu", f.mu, "mean demand (default: sample mean)");
  f.o_sigma = sub->add_option("--sigma", f.sigma, "demand std dev (default: sample std dev)");
  f.o_delta = sub->add_option("--delta", f.delta, "Wasserstein radius, or comma list for sweeps");
  f.o_mode = sub->add_option("--mode", f.mode, "inner solver: dd or grid");
  f.o_out = sub->add_option("--out", f.out, "output directory");
  f.o_workers = sub->add_option("--workers", f.workers, "concurrent sweep rows");
  f.o_weighting = sub->add_option("--weighting", f.weighting, "empirical (1/n) or unweighted");
  sub->add_flag("--verify", f.verify, "run oracle checks per row");
  sub->add_flag("--timing", f.timing, "write measured runtimes into sweep.csv");
}

SweepConfig build_config(const Flags& f) {
  SweepConfig cfg;
  if (!f.config.empty()) cfg = load_config_json(f.config);
  if (f.o_input->count()) cfg.input = f.input;
  if (f.o_c1->count() || f.o_c2->count()) {
    if (!f.o_c1->count() || !f.o_c2->count()) {
      throw Error(ErrorKind::InvalidArgument, "--c1 and --c2 go together");
    }
    cfg.costs = CostParams{f.c1, f.c2};
    cfg.profit.reset();
  }
  if (f.o_p->count() || f.o_c->count() || f.o_s->count()) {
    if (!f.o_p->count() || !f.o_c->count() || !f.o_s->count()) {
      throw Error(ErrorKind::InvalidArgument, "--p, --c and --s go together");
    }
    cfg.profit = ProfitParams{f.p, f.c, f.s};
    if (!f.o_c1->count()) cfg.costs.reset();
  }
  if (f.o_mu->count()) cfg.mu = f.mu;
  if (f.o_sigma->count()) cfg.sigma = f.sigma;
  if (f.o_delta->count()) cfg.deltas = parse_delta_list(f.delta);
  if (f.o_mode->count()) {
    if (f.mode == "dd") {
      cfg.mode = InnerMode::Dd;
    } else if (f.mode == "grid") {
      cfg.mode = InnerMode::Grid;
    } else {
      throw Error(ErrorKind::InvalidArgument, "--mode must be dd or grid");
    }
  }
  if (f.o_weighting->count()) {
    if (f.weighting == "empirical") {
      cfg.weighting = Weighting::Empirical;
    } else if (f.weighting == "unweighted") {
      cfg.weighting = Weighting::Unweighted;
    } else {
      throw Error(ErrorKind::InvalidArgument, "--weighting must be empirical or unweighted");
    }
  }
  if (f.verify) cfg.verify = true;
  if (f.timing) cfg.timing = true;
  if (f.o_out->count()) cfg.out_dir = f.out;
  if (f.o_workers->count()) cfg.workers = f.workers;
  validate_config(cfg);
  return cfg;
}

ValidatedInstance instance_for(const SweepConfig& cfg, double delta) {
  if (cfg.input.empty()) throw Error(ErrorKind::InvalidArgument, "--input is required");
  const auto samples = ingest_csv(cfg.input);
  std::optional<MomentSpec> moments;
  if (cfg.mu || cfg.sigma) {
    const auto [mu, sigma] = empirical_moments(samples);
    moments = MomentSpec{cfg.mu.value_or(mu), cfg.sigma.value_or(sigma)};
  }
  return make_instance(samples, delta, resolve_costs(cfg), moments, cfg.weighting);
}

double single_delta(const SweepConfig& cfg, const Flags& f) {
  if (!f.o_delta->count() && cfg.deltas.size() != 1) {
    throw Error(ErrorKind::InvalidArgument, "--delta is required");
  }
  if (cfg.deltas.size() != 1) throw Error(ErrorKind::InvalidArgument, "expected a single --delta value");
  return cfg.deltas.front();
}

OuterConfig outer_for(const SweepConfig& cfg) {
  OuterConfig oc;
  oc.inner = cfg.mode;
  return oc;
}

int cmd_solve(const Flags& f, const std::string& geometry) {
  const SweepConfig cfg = build_config(f);
  const auto inst = instance_for(cfg, single_delta(cfg, f));
  const SolveReport rep = solve(inst, outer_for(cfg));
  const auto j = solve_report_json(rep);
  std::cout << j.dump(2) << "\n";
  if (f.o_out->count()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_text(std::filesystem::path(cfg.out_dir) / "report.json", j.dump(2) + "\n");
  }
  if (!geometry.empty()) {
    DdOptions opts;
    opts.record_path = true;
    const DdResult dd = dd_minimize(inst, rep.xi_star, rep.q_star, opts);
    write_text(geometry, geometry_json(build_geometry(inst, rep.xi_star, rep.q_star), &dd) + "\n");
  }
  return 0;
}

int cmd_sweep(const Flags& f) {
  SweepConfig cfg = build_config(f);
  const SweepTable table = run_sweep(cfg);
  emit_report(table, cfg.out_dir);
  std::cout << sweep_csv(table);
  std::printf("scarf limit: q_star=%s cost=%s\n", format_g6(table.scarf_q).c_str(),
              format_g6(table.scarf_cost).c_str());
  int code = 0;
  for (const auto& row : table.rows) {
    if (!row.ok) {
      std::fprintf(stderr, "delta=%s failed: %s\n", format_g6(row.delta).c_str(), row.error.c_str());
      code = std::max(code, row.error_kind ? exit_code_for(*row.error_kind) : 3);
    }
  }
  return code;
}

int cmd_verify(const Flags& f) {
  const SweepConfig cfg = build_config(f);
  int failures = 0;
  auto report = [&](bool ok, const std::string& name, double delta, const std::string& detail) {
    if (!ok) ++failures;
    std::printf("%-4s  %-22s delta=%-8s %s\n", ok ? "PASS" : "FAIL", name.c_str(), format_g6(delta).c_str(),
                detail.c_str());
  };
  for (double delta : cfg.deltas) {
    const auto inst = instance_for(cfg, delta);
    SolveReport rep;
    try {
      rep = solve(inst, outer_for(cfg));
    } catch (const Error& e) {
      report(false, "solve", delta, e.what());
      continue;
    }
    const auto& costs = inst.costs();

    double worst = 0.0;
    for (double x : inst.samples()) {
      const auto closed = sup_g(x, rep.dual_point, rep.q_star, costs);
      const auto brute = brute_sup_g(x, rep.dual_point, rep.q_star, costs, 1e-4);
      worst = std::max(worst, std::abs(closed.g_value - brute.value) / (1.0 + std::abs(brute.value)));
    }
    report(worst <= 1e-6, "inner-vs-brute", delta, "max rel err " + format_g6(worst));

    GridSpec gs;
    gs.refinements = 6;
    const GridResult g = grid_minimize(inst, rep.xi_star, rep.q_star, gs);
    const double gap = std::abs(rep.worst_case_cost - g.f_value) / (1.0 + std::abs(g.f_value));
    report(gap <= 1e-3, "dd-vs-grid", delta, "rel gap " + format_g6(gap));

    const double sg = h_subgradient(inst, rep.q_star, rep.worst_case_atoms);
    report(std::abs(sg) <= std::max(costs.c1, costs.c2) + 1e-12, "subgradient-bound", delta,
           "subgradient " + format_g6(sg));

    if (delta == 0.0) {
      // With no transport budget the mass stays on the samples, which a
      // uniform support grid does not contain in general.
      std::printf("SKIP  %-22s delta=%-8s %s\n", "weak-duality", format_g6(delta).c_str(),
                  "primal support must hold the samples exactly");
      continue;
    }
    double y_max = std::max(inst.max_sample(), rep.q_star);
    for (const auto& a : rep.worst_case_atoms) y_max = std::max(y_max, a.x);
    try {
      const auto p = primal_lp_value(inst, rep.q_star, SupportGrid::uniform(1.25 * y_max + 1.0, 100), 0.0);
      const double margin = rep.worst_case_cost - p.value;
      report(margin >= -1e-6, "weak-duality", delta,
             "primal " + format_g6(p.value) + " dual " + format_g6(rep.worst_case_cost));
    } catch (const Error& e) {
      report(false, "weak-duality", delta, e.what());
    }
  }
  return failures == 0 ? 0 : 3;
}

int cmd_scarf(const Flags& f) {
  SweepConfig cfg = build_config(f);
  MomentSpec m;
  if (cfg.mu && cfg.sigma) {
    m = {*cfg.mu, *cfg.sigma};
  } else {
    if (cfg.input.empty()) throw Error(ErrorKind::InvalidArgument, "give --mu and --sigma, or --input");
    const auto [mu, sigma] = empirical_moments(ingest_csv(cfg.input));
    m = {cfg.mu.value_or(mu), cfg.sigma.value_or(sigma)};
  }
  if (m.sigma < 0.0) throw Error(ErrorKind::NegativeSigma, "sigma must be >= 0");
  const CostParams costs = resolve_costs(cfg);
  if (!(costs.c1 > 0.0 && costs.c2 > 0.0)) throw Error(ErrorKind::NonpositiveCost, "costs must be > 0");
  const auto [q, cost] = scarf_solution(m, costs);
  std::printf("q_star=%s cost=%s\n", format_g6(q).c_str(), format_g6(cost).c_str());
  return 0;
}

int cmd_primal(const Flags& f, double q, std::size_t support, double slack, const std::string& plan) {
  const SweepConfig cfg = build_config(f);
  const auto inst = instance_for(cfg, single_delta(cfg, f));
  if (!(q >= 0.0)) throw Error(ErrorKind::InvalidArgument, "--q must be >= 0");
  if (slack < 0.0) throw Error(ErrorKind::InvalidArgument, "--slack must be >= 0");
  const XiSearch dual = minimize_xi(inst, q, outer_for(cfg));
  double y_max = std::max(inst.max_sample(), q);
  for (const auto& a : worst_case_atoms(inst, dual.dual(), q)) y_max = std::max(y_max, a.x);
  const SupportGrid grid = SupportGrid::uniform(1.25 * y_max + 1.0, support);
  const PrimalLpResult p = primal_lp_value(inst, q, grid, slack);
  std::printf("primal=%s dual=%s margin=%s rel_gap=%s marginal_error=%s\n", format_g6(p.value).c_str(),
              format_g6(dual.h_value).c_str(), format_g6(dual.h_value - p.value).c_str(),
              format_g6((dual.h_value - p.value) / (1.0 + std::abs(dual.h_value))).c_str(),
              format_g6(p.marginal_error).c_str());
  if (!plan.empty()) write_text(plan, plan_csv(p, inst, grid));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust newsvendor solver"};
  app.require_subcommand(1);

  Flags f_solve, f_sweep, f_verify, f_scarf, f_primal;
  std::string geometry, plan;
  double q = -1.0, slack = 0.0;
  std::size_t support = 200;

  auto* solve_cmd = app.add_subcommand("solve", "solve at a single delta");
  add_common(solve_cmd, f_solve);
  solve_cmd->add_option("--geometry", geometry, "write DD cut lines and path as JSON");

  auto* sweep_cmd = app.add_subcommand("sweep", "solve over a delta list and write reports");
  add_common(sweep_cmd, f_sweep);

  auto* verify_cmd = app.add_subcommand("verify", "run oracle cross-checks");
  add_common(verify_cmd, f_verify);

  auto* scarf_cmd = app.add_subcommand("scarf", "print the moments-only baseline");
  add_common(scarf_cmd, f_scarf);

  auto* primal_cmd = app.add_subcommand("primal-check", "discretised primal LP at a given Q");
  add_common(primal_cmd, f_primal);
  primal_cmd->add_option("--q", q, "order quantity")->required();
  primal_cmd->add_option("--support", support, "support grid size")->check(CLI::Range(2, 100000));
  primal_cmd->add_option("--slack", slack, "moment band half-width; 0 keeps exact moments");
  primal_cmd->add_option("--plan", plan, "write the transport plan as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(f_solve, geometry);
    if (*sweep_cmd) return cmd_sweep(f_sweep);
    if (*verify_cmd) return cmd_verify(f_verify);
    if (*scarf_cmd) return cmd_scarf(f_scarf);
    if (*primal_cmd) return cmd_primal(f_primal, q, support, slack, plan);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 1;
}
