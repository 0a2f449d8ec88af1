#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drnv/model.hpp"
#include "drnv/outer_solver.hpp"

namespace drnv {

struct SweepConfig {
  std::string input;
  std::optional<CostParams> costs;
  std::optional<ProfitParams> profit;
  std::optional<double> mu;
  std::optional<double> sigma;
  std::vector<double> deltas{0.0, 1.0, 2.5, 5.0, 10.0, 15.0, 20.0};
  InnerMode mode = InnerMode::Dd;
  bool verify = false;
  std::string out_dir = ".";
  int workers = 1;
  bool timing = false;  // write measured runtimes into sweep.csv (breaks byte-identity)
  Weighting weighting = Weighting::Empirical;
};

/// Checks the delta list and cost inputs; throws InvalidArgument or
/// OrderingViolation.
void validate_config(const SweepConfig& cfg);

/// Cost parameters from either (c1, c2) or (p, c, s).
CostParams resolve_costs(const SweepConfig& cfg);

/// Overlays keys from a JSON object onto cfg.
void apply_config_json(SweepConfig& cfg, const nlohmann::json& j);
SweepConfig load_config_json(const std::filesystem::path& path);

/// One value per line, or `period,value` with a header row. Blank lines and
/// lines starting with '#' are skipped.
std::vector<double> ingest_csv(const std::filesystem::path& path);
std::vector<double> parse_samples(const std::string& text);

/// Writes samples one per line at full precision.
void write_samples_csv(const std::filesystem::path& path, const std::vector<double>& samples);

struct SweepRow {
  double delta = 0.0;
  bool ok = false;
  std::string error;
  std::optional<ErrorKind> error_kind;
  SolveReport report;
  double runtime_ms = 0.0;
  double oracle_gap = std::numeric_limits<double>::quiet_NaN();
  double duality_margin = std::numeric_limits<double>::quiet_NaN();
};

struct SweepTable {
  SweepConfig config;
  CostParams costs;
  MomentSpec moments;
  std::size_t sample_count = 0;
  std::vector<SweepRow> rows;
  double scarf_q = 0.0;
  double scarf_cost = 0.0;
};

SweepTable run_sweep(const SweepConfig& cfg, const std::vector<double>& samples);
SweepTable run_sweep(const SweepConfig& cfg);

std::string format_g6(double v);
std::string sweep_csv(const SweepTable& table);
nlohmann::json report_json(const SweepTable& table);
nlohmann::json solve_report_json(const SolveReport& rep);
std::string figure_svg(const SweepTable& table);

/// Writes sweep.csv, report.json and figure2.svg into dir. Throws IoError.
void emit_report(const SweepTable& table, const std::filesystem::path& dir);

/// Process exit status for a failure: 1 usage, 2 data, 3 solver.
int exit_code_for(ErrorKind kind);

/// Parses "0,1,2.5"; throws InvalidArgument.
std::vector<double> parse_delta_list(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace drnv
