#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "drnv/inner_eval.hpp"
#include "drnv/sweep.hpp"

using namespace drnv;
namespace fs = std::filesystem;

namespace {

const std::vector<double> kData{8.5, 9.1, 12, 10.2, 14};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("drnv_sweep_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int count(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.costs = CostParams{20, 10};
  cfg.deltas = {0, 1, 5};
  return cfg;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("sample parsing") {
    CHECK(parse_samples("1\n2.5\n3e1\n") == std::vector<double>{1, 2.5, 30});
    CHECK(parse_samples("period,value\n2020-01,4\n2020-02, 5.5\n") == std::vector<double>{4, 5.5});
    CHECK(parse_samples("# monthly\n\n7\r\n  # note\n8\n") == std::vector<double>{7, 8});
    CHECK(kind_of([] { parse_samples("# nothing\n\n"); }) == ErrorKind::EmptyFile);
    CHECK(parse_samples("10\n12\n9\n") == std::vector<double>{10, 12, 9});
    CHECK(parse_samples("month,units\n2019-01,8.5\n2019-02,9.1\n") == std::vector<double>{8.5, 9.1});
    try {
      parse_samples("abc\n");
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ParseError);
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
    CHECK(kind_of([] { parse_samples("1\nabc\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse_samples("1,2,3\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse_samples("4\nmonth,x\n"); }) == ErrorKind::ParseError);
  }

  TEST_CASE("file ingestion") {
    const auto dir = scratch("ingest");
    CHECK(kind_of([&] { ingest_csv(dir / "missing.csv"); }) == ErrorKind::IoError);
    write_text(dir / "empty.csv", "");
    CHECK(kind_of([&] { ingest_csv(dir / "empty.csv"); }) == ErrorKind::EmptyFile);
    const std::vector<double> xs{0.1, 1.0 / 3.0, 12345.678901234567};
    write_samples_csv(dir / "xs.csv", xs);
    CHECK(ingest_csv(dir / "xs.csv") == xs);
  }

  TEST_CASE("delta lists and configs") {
    CHECK(parse_delta_list("0,1, 2.5") == std::vector<double>{0, 1, 2.5});
    CHECK(kind_of([] { parse_delta_list("1,,2"); }) == ErrorKind::InvalidArgument);

    auto cfg = small_config();
    validate_config(cfg);
    cfg.deltas = {};
    CHECK(kind_of([&] { validate_config(cfg); }) == ErrorKind::InvalidArgument);
    cfg.deltas = {1, 1};
    CHECK(kind_of([&] { validate_config(cfg); }) == ErrorKind::InvalidArgument);
    cfg.deltas = {-1};
    CHECK(kind_of([&] { validate_config(cfg); }) == ErrorKind::InvalidArgument);
    cfg = small_config();
    cfg.workers = 0;
    CHECK(kind_of([&] { validate_config(cfg); }) == ErrorKind::InvalidArgument);
    cfg = small_config();
    cfg.costs.reset();
    CHECK(kind_of([&] { validate_config(cfg); }) == ErrorKind::InvalidArgument);
    cfg.profit = ProfitParams{5, 6, 1};
    CHECK(kind_of([&] { validate_config(cfg); }) == ErrorKind::OrderingViolation);
    cfg.profit = ProfitParams{10, 6, 1};
    CHECK(resolve_costs(cfg) == CostParams{4, 5});
    cfg.costs = CostParams{1, 1};
    CHECK(kind_of([&] { validate_config(cfg); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("JSON config") {
    SweepConfig cfg;
    apply_config_json(cfg, nlohmann::json::parse(
                               R"({"input":"d.csv","c1":3,"c2":4,"delta":[0,2],"mode":"grid","workers":2,"mu":5})"));
    CHECK(cfg.input == "d.csv");
    CHECK(cfg.costs == CostParams{3, 4});
    CHECK(cfg.deltas == std::vector<double>{0, 2});
    CHECK(cfg.mode == InnerMode::Grid);
    CHECK(cfg.workers == 2);
    CHECK(cfg.mu == 5.0);
    CHECK_FALSE(cfg.sigma);
    CHECK(kind_of([&] { apply_config_json(cfg, nlohmann::json::parse(R"({"mode":"fast"})")); }) ==
          ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { apply_config_json(cfg, nlohmann::json::parse(R"({"c1":3})")); }) == ErrorKind::ParseError);

    const auto dir = scratch("config");
    write_text(dir / "cfg.json", R"({"p":10,"c":6,"s":1})");
    const auto loaded = load_config_json(dir / "cfg.json");
    CHECK(resolve_costs(loaded) == CostParams{4, 5});
    write_text(dir / "bad.json", "{");
    CHECK(kind_of([&] { load_config_json(dir / "bad.json"); }) == ErrorKind::ParseError);
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code_for(ErrorKind::InvalidArgument) == 1);
    CHECK(exit_code_for(ErrorKind::OrderingViolation) == 1);
    CHECK(exit_code_for(ErrorKind::NegativeDelta) == 1);
    CHECK(exit_code_for(ErrorKind::NegativeSample) == 2);
    CHECK(exit_code_for(ErrorKind::EmptyFile) == 2);
    CHECK(exit_code_for(ErrorKind::ParseError) == 2);
    CHECK(exit_code_for(ErrorKind::Infeasible) == 3);
    CHECK(exit_code_for(ErrorKind::PrimalInfeasible) == 3);
  }

  TEST_CASE("number formatting") {
    CHECK(format_g6(1.0) == "1");
    CHECK(format_g6(10.70710678) == "10.7071");
    CHECK(format_g6(-0.0) == "0");
    CHECK(format_g6(std::nan("")) == "NaN");
  }

  TEST_CASE("sweep rows") {
    const auto table = run_sweep(small_config(), kData);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.sample_count == 5);
    double prev = -INFINITY;
    for (const auto& row : table.rows) {
      REQUIRE(row.ok);
      CHECK(row.report.worst_case_cost >= prev - 1e-6);
      CHECK(row.report.worst_case_cost <= table.scarf_cost * (1 + 1e-6));
      prev = row.report.worst_case_cost;
    }
    // zero radius is the empirical newsvendor
    double best = INFINITY;
    for (double q : kData) {
      double s = 0;
      for (double x : kData) s += newsvendor_loss(x, q, {20, 10}) / 5;
      best = std::min(best, s);
    }
    CHECK(table.rows[0].report.worst_case_cost == doctest::Approx(best).epsilon(1e-4));
  }

  TEST_CASE("parallel workers reproduce the serial table") {
    auto cfg = small_config();
    const auto a = run_sweep(cfg, kData);
    cfg.workers = 3;
    const auto b = run_sweep(cfg, kData);
    CHECK(sweep_csv(a) == sweep_csv(b));
  }

  TEST_CASE("report outputs") {
    auto cfg = small_config();
    cfg.verify = true;
    const auto table = run_sweep(cfg, kData);
    const auto csv = sweep_csv(table);
    CHECK(count(csv, "\n") == 4);
    CHECK(csv.rfind("delta,cost,q_star,xi_star,lambda1,lambda2,lambda3,mode,oracle_gap,runtime_ms,status\n", 0) == 0);
    CHECK(count(csv, ",NA,ok\n") == 3);
    for (const auto& row : table.rows) CHECK(row.oracle_gap <= 1e-3);
    CHECK(table.rows[2].duality_margin >= -1e-6);

    const auto j = report_json(table);
    CHECK(j["rows"].size() == 3);
    CHECK(j["scarf"]["q_star"].get<double>() == table.scarf_q);
    CHECK(j.contains("units"));

    const auto svg = figure_svg(table);
    CHECK(count(svg, "<polyline") == 2);
    CHECK(count(svg, "stroke-dasharray") == 2);

    const auto dir = scratch("emit");
    emit_report(table, dir);
    for (const char* f : {"sweep.csv", "report.json", "figure2.svg"}) CHECK(fs::exists(dir / f));
    std::ifstream in(dir / "sweep.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == csv);
  }

  TEST_CASE("failed rows are kept") {
    // The mean sits 8.5 units away from the data, out of reach at radius 0.
    SweepConfig cfg;
    cfg.costs = CostParams{20, 10};
    cfg.deltas = {0, 200};
    cfg.mu = 10.0;
    cfg.sigma = 0.5;
    const auto table = run_sweep(cfg, {1.0, 2.0});
    REQUIRE(table.rows.size() == 2);
    CHECK_FALSE(table.rows[0].ok);
    CHECK(table.rows[0].error_kind == ErrorKind::Infeasible);
    CHECK(table.rows[1].ok);
    const auto csv = sweep_csv(table);
    CHECK(csv.find("\n0,NaN,NaN,NaN,NaN,NaN,NaN,dd,NaN,NA,failed\n") != std::string::npos);
    CHECK(report_json(table)["rows"][0]["status"] == "failed");
  }
}
