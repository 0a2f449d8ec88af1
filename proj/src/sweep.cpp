#include "drnv/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "drnv/inner_eval.hpp"
#include "drnv/oracle.hpp"

namespace drnv {

void validate_config(const SweepConfig& cfg) {
  if (cfg.deltas.empty()) throw Error(ErrorKind::InvalidArgument, "delta list is empty");
  for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
    const double d = cfg.deltas[k];
    if (!std::isfinite(d) || d < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "delta values must be finite and nonnegative");
    }
    if (k > 0 && !(d > cfg.deltas[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "delta list must be strictly increasing");
    }
  }
  if (cfg.workers < 1) throw Error(ErrorKind::InvalidArgument, "workers must be at least 1");
  resolve_costs(cfg);
}

CostParams resolve_costs(const SweepConfig& cfg) {
  if (cfg.costs && cfg.profit) {
    throw Error(ErrorKind::InvalidArgument, "give either c1/c2 or p/c/s, not both");
  }
  if (cfg.profit) return profit_params_to_costs(*cfg.profit);
  if (cfg.costs) return *cfg.costs;
  throw Error(ErrorKind::InvalidArgument, "cost parameters missing: give c1/c2 or p/c/s");
}

void apply_config_json(SweepConfig& cfg, const nlohmann::json& j) {
  try {
    if (j.contains("input")) cfg.input = j.at("input").get<std::string>();
    if (j.contains("c1") || j.contains("c2")) {
      cfg.costs = CostParams{j.at("c1").get<double>(), j.at("c2").get<double>()};
    }
    if (j.contains("p") || j.contains("c") || j.contains("s")) {
      cfg.profit = ProfitParams{j.at("p").get<double>(), j.at("c").get<double>(), j.at("s").get<double>()};
    }
    if (j.contains("mu")) cfg.mu = j.at("mu").get<double>();
    if (j.contains("sigma")) cfg.sigma = j.at("sigma").get<double>();
    if (j.contains("delta")) cfg.deltas = j.at("delta").get<std::vector<double>>();
    if (j.contains("mode")) {
      const auto m = j.at("mode").get<std::string>();
      if (m == "dd") {
        cfg.mode = InnerMode::Dd;
      } else if (m == "grid") {
        cfg.mode = InnerMode::Grid;
      } else {
        throw Error(ErrorKind::InvalidArgument, "mode must be dd or grid");
      }
    }
    if (j.contains("verify")) cfg.verify = j.at("verify").get<bool>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
    if (j.contains("weighting")) {
      const auto w = j.at("weighting").get<std::string>();
      cfg.weighting = w == "unweighted" ? Weighting::Unweighted : Weighting::Empirical;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
}

SweepConfig load_config_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  SweepConfig cfg;
  apply_config_json(cfg, j);
  return cfg;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::vector<double> parse_samples(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const bool first = !seen_content;
    seen_content = true;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      fields.push_back(t.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() > 2) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected 1 or 2 columns");
    }
    const auto v = parse_double(fields.back());
    if (!v) {
      if (first && fields.size() == 2) continue;  // header row
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": not a number: '" +
                                             std::string(trim(fields.back())) + "'");
    }
    out.push_back(*v);
  }
  if (out.empty()) throw Error(ErrorKind::EmptyFile, "no samples found");
  return out;
}

std::vector<double> ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_samples(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonpositiveCost:
    case ErrorKind::NegativeDelta:
    case ErrorKind::NegativeSigma:
    case ErrorKind::InvalidArgument:
    case ErrorKind::OrderingViolation:
      return 1;
    case ErrorKind::NegativeSample:
    case ErrorKind::EmptySamples:
    case ErrorKind::ParseError:
    case ErrorKind::EmptyFile:
    case ErrorKind::IoError:
      return 2;
    default:
      return 3;
  }
}

std::vector<double> parse_delta_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = std::string_view(text).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto v = parse_double(piece);
    if (!v) throw Error(ErrorKind::InvalidArgument, "bad delta value '" + std::string(trim(piece)) + "'");
    out.push_back(*v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<double>& samples) {
  std::string text;
  char buf[64];
  for (double v : samples) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    text += buf;
  }
  write_text(path, text);
}

namespace {

SweepRow run_row(const ValidatedInstance& base, double delta, const SweepConfig& cfg, Exec exec) {
  SweepRow row;
  row.delta = delta;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ValidatedInstance inst = base.with_delta(delta);
    OuterConfig oc;
    oc.inner = cfg.mode;
    oc.exec = exec;
    oc.grid.exec = exec;
    row.report = solve(inst, oc);
    row.ok = true;
    if (cfg.verify) {
      const auto& rep = row.report;
      GridSpec gs;
      gs.exec = exec;
      gs.refinements = 6;
      const GridResult g = grid_minimize(inst, rep.xi_star, rep.q_star, gs);
      row.oracle_gap = std::abs(rep.worst_case_cost - g.f_value) / (1.0 + std::abs(g.f_value));
      double y_max = std::max(inst.max_sample(), rep.q_star);
      for (const auto& atom : rep.worst_case_atoms) y_max = std::max(y_max, atom.x);
      y_max = 1.25 * y_max + 1.0;
      try {
        const PrimalLpResult p =
            primal_lp_value(inst, rep.q_star, SupportGrid::uniform(y_max, 100), 0.0);
        row.duality_margin = rep.worst_case_cost - p.value;
      } catch (const Error&) {
        // margin stays NaN when the discretised primal has no feasible plan
      }
    }
  } catch (const Error& e) {
    row.ok = false;
    row.error = e.what();
    row.error_kind = e.kind();
  }
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

SweepTable run_sweep(const SweepConfig& cfg, const std::vector<double>& samples) {
  validate_config(cfg);
  SweepTable table;
  table.config = cfg;
  table.costs = resolve_costs(cfg);
  std::optional<MomentSpec> moments;
  if (cfg.mu || cfg.sigma) {
    const auto [mu, sigma] = empirical_moments(samples);
    moments = MomentSpec{cfg.mu.value_or(mu), cfg.sigma.value_or(sigma)};
  }
  const ValidatedInstance base = make_instance(samples, cfg.deltas.front(), table.costs, moments, cfg.weighting);
  table.moments = base.moments();
  table.sample_count = base.size();
  std::tie(table.scarf_q, table.scarf_cost) = scarf_solution(table.moments, table.costs);

  table.rows.resize(cfg.deltas.size());
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), cfg.deltas.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
      table.rows[k] = run_row(base, cfg.deltas[k], cfg, Exec::Parallel);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < cfg.deltas.size(); k = next++) {
          table.rows[k] = run_row(base, cfg.deltas[k], cfg, Exec::Serial);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return table;
}

SweepTable run_sweep(const SweepConfig& cfg) {
  if (cfg.input.empty()) throw Error(ErrorKind::InvalidArgument, "no input file given");
  return run_sweep(cfg, ingest_csv(cfg.input));
}

std::string format_g6(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string sweep_csv(const SweepTable& table) {
  const char* mode = table.config.mode == InnerMode::Dd ? "dd" : "grid";
  std::string out = "delta,cost,q_star,xi_star,lambda1,lambda2,lambda3,mode,oracle_gap,runtime_ms,status\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : table.rows) {
    const auto& r = row.report;
    const auto cell = [&](double v) { return format_g6(row.ok ? v : nan); };
    out += format_g6(row.delta) + ',' + cell(r.worst_case_cost) + ',' + cell(r.q_star) + ',' +
           cell(r.xi_star) + ',' + cell(r.dual_point.lambda1) + ',' + cell(r.dual_point.lambda2) + ',' +
           cell(r.dual_point.lambda3) + ',' + mode + ',' + format_g6(row.oracle_gap) + ',' +
           (table.config.timing ? format_g6(row.runtime_ms) : std::string("NA")) + ',' +
           (row.ok ? "ok" : "failed") + '\n';
  }
  return out;
}

namespace {

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json solve_report_json(const SolveReport& rep) {
  nlohmann::json j;
  j["q_star"] = rep.q_star;
  j["worst_case_cost"] = rep.worst_case_cost;
  j["xi_star"] = rep.xi_star;
  j["dual_point"] = {{"lambda1", rep.dual_point.lambda1},
                     {"lambda2", rep.dual_point.lambda2},
                     {"lambda3", rep.dual_point.lambda3}};
  auto regions = nlohmann::json::array();
  for (const auto& r : rep.per_sample_regions) {
    regions.push_back({{"region", to_string(r.region)},
                       {"case", to_string(r.case_id)},
                       {"x_star", r.x_star},
                       {"g_value", r.g_value}});
  }
  j["per_sample_regions"] = std::move(regions);
  auto atoms = nlohmann::json::array();
  for (const auto& a : rep.worst_case_atoms) {
    atoms.push_back({{"sample", a.sample}, {"x", a.x}, {"mass", a.mass}});
  }
  j["worst_case_atoms"] = std::move(atoms);
  j["bisection_steps"] = rep.bisection_steps;
  j["dd_calls"] = rep.dd_calls;
  j["q_tol"] = rep.q_tol;
  j["xi_tol"] = rep.xi_tol;
  j["q_at_zero"] = rep.q_at_zero;
  j["no_sign_change"] = rep.no_sign_change;
  j["xi_at_cap"] = rep.xi_at_cap;
  return j;
}

nlohmann::json report_json(const SweepTable& table) {
  const auto& cfg = table.config;
  nlohmann::json j;
  j["units"] = {{"demand", "thousands of units"},
                {"c1_c2", "thousands of currency per thousand units"},
                {"cost", "millions of currency"}};
  j["input"] = cfg.input;
  j["mode"] = cfg.mode == InnerMode::Dd ? "dd" : "grid";
  j["weighting"] = cfg.weighting == Weighting::Empirical ? "empirical" : "unweighted";
  j["costs"] = {{"c1", table.costs.c1}, {"c2", table.costs.c2}};
  j["moments"] = {{"mu", table.moments.mu}, {"sigma", table.moments.sigma}};
  j["sample_count"] = table.sample_count;
  j["scarf"] = {{"q_star", table.scarf_q}, {"cost", table.scarf_cost}};
  auto rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r;
    r["delta"] = row.delta;
    r["status"] = row.ok ? "ok" : "failed";
    r["runtime_ms"] = row.runtime_ms;
    if (row.ok) {
      r["report"] = solve_report_json(row.report);
    } else {
      r["error"] = row.error;
    }
    if (cfg.verify) {
      r["oracle_gap"] = num(row.oracle_gap);
      r["duality_margin"] = num(row.duality_margin);
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

namespace {

struct Axis {
  double lo = 0.0;
  double hi = 1.0;

  static Axis covering(std::vector<double> vals) {
    Axis ax;
    if (vals.empty()) return ax;
    const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
    double span = *mx - *mn;
    if (span <= 0.0) span = std::max(1.0, std::abs(*mx));
    ax.lo = *mn - 0.08 * span;
    ax.hi = *mx + 0.08 * span;
    return ax;
  }
};

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string figure_svg(const SweepTable& table) {
  const double W = 720, H = 420, left = 80, right = 640, top = 40, bottom = 360;
  std::vector<double> ds, costs, qs;
  for (const auto& row : table.rows) {
    if (!row.ok) continue;
    ds.push_back(row.delta);
    costs.push_back(row.report.worst_case_cost);
    qs.push_back(row.report.q_star);
  }
  std::vector<double> xdom = ds;
  if (xdom.empty()) xdom = table.config.deltas;
  const double xlo = xdom.empty() ? 0.0 : *std::min_element(xdom.begin(), xdom.end());
  double xhi = xdom.empty() ? 1.0 : *std::max_element(xdom.begin(), xdom.end());
  if (xhi <= xlo) xhi = xlo + 1.0;

  auto cvals = costs;
  cvals.push_back(table.scarf_cost);
  auto qvals = qs;
  qvals.push_back(table.scarf_q);
  const Axis ca = Axis::covering(cvals);
  const Axis qa = Axis::covering(qvals);

  const auto px = [&](double d) { return left + (d - xlo) / (xhi - xlo) * (right - left); };
  const auto py = [&](const Axis& a, double v) { return bottom - (v - a.lo) / (a.hi - a.lo) * (bottom - top); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
    << "\" stroke=\"#1f77b4\"/>\n";
  s << "<line x1=\"" << right << "\" y1=\"" << top << "\" x2=\"" << right << "\" y2=\"" << bottom
    << "\" stroke=\"#d62728\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double f = k / 4.0;
    const double y = bottom - f * (bottom - top);
    s << "<text x=\"" << left - 8 << "\" y=\"" << fmt_coord(y + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_g6(ca.lo + f * (ca.hi - ca.lo)) << "</text>\n";
    s << "<text x=\"" << right + 8 << "\" y=\"" << fmt_coord(y + 4) << "\" font-size=\"11\">"
      << format_g6(qa.lo + f * (qa.hi - qa.lo)) << "</text>\n";
    const double d = xlo + f * (xhi - xlo);
    s << "<text x=\"" << fmt_coord(px(d)) << "\" y=\"" << bottom + 18
      << "\" text-anchor=\"middle\" font-size=\"11\">" << format_g6(d) << "</text>\n";
  }
  s << "<text x=\"" << (left + right) / 2 << "\" y=\"" << bottom + 40
    << "\" text-anchor=\"middle\" font-size=\"13\">delta (ambiguity)</text>\n";
  s << "<text x=\"20\" y=\"" << (top + bottom) / 2 << "\" font-size=\"13\" fill=\"#1f77b4\" transform=\"rotate(-90 20 "
    << (top + bottom) / 2 << ")\" text-anchor=\"middle\">worst-case cost (millions)</text>\n";
  s << "<text x=\"" << W - 20 << "\" y=\"" << (top + bottom) / 2 << "\" font-size=\"13\" fill=\"#d62728\" transform=\"rotate(90 "
    << W - 20 << ' ' << (top + bottom) / 2 << ")\" text-anchor=\"middle\">order quantity Q (thousands)</text>\n";

  s << "<line x1=\"" << left << "\" y1=\"" << fmt_coord(py(ca, table.scarf_cost)) << "\" x2=\"" << right
    << "\" y2=\"" << fmt_coord(py(ca, table.scarf_cost))
    << "\" stroke=\"#1f77b4\" stroke-dasharray=\"6 4\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << fmt_coord(py(qa, table.scarf_q)) << "\" x2=\"" << right
    << "\" y2=\"" << fmt_coord(py(qa, table.scarf_q)) << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";

  const auto poly = [&](const std::vector<double>& vals, const Axis& a, const char* color) {
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (k) s << ' ';
      s << fmt_coord(px(ds[k])) << ',' << fmt_coord(py(a, vals[k]));
    }
    s << "\"/>\n";
  };
  poly(costs, ca, "#1f77b4");
  poly(qs, qa, "#d62728");

  s << "<text x=\"" << left + 10 << "\" y=\"" << top - 14 << "\" font-size=\"12\" fill=\"#1f77b4\">cost (Scarf limit dashed)</text>\n";
  s << "<text x=\"" << right - 10 << "\" y=\"" << top - 14
    << "\" font-size=\"12\" fill=\"#d62728\" text-anchor=\"end\">Q (Scarf limit dashed)</text>\n";
  s << "</svg>\n";
  return s.str();
}

void emit_report(const SweepTable& table, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "sweep.csv", sweep_csv(table));
  write_text(dir / "report.json", report_json(table).dump(2) + "\n");
  write_text(dir / "figure2.svg", figure_svg(table));
}

}  // namespace drnv
