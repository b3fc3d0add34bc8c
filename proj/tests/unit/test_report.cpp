#include "birchmax/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"

using namespace birchmax;
using namespace birchmax::report;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_count_config() {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.set("radii", "2,4,8");
  cfg.set("count_ratio_kmax", "2");
  cfg.set("count_slope_min", "2.0");
  cfg.set("count_slope_max", "4.0");
  return cfg;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("config defaults, overrides and rejection of unknown keys") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    CHECK(cfg.str("form") == "x1^2+x2^2+x3^2-x4^2-x5^2");
    CHECK(cfg.i64("seed") == 20240817);
    CHECK(cfg.i64_list("radii") == std::vector<long long>{8, 16, 32, 64});
    CHECK(cfg.real("lemma4_tol") == doctest::Approx(1e-8));
    cfg.set("seed", "7");
    CHECK(cfg.u64("seed") == 7);
    CHECK_THROWS_AS(cfg.set("no_such_key", "1"), ConfigInvalid);
    CHECK_THROWS_AS(cfg.i64("form"), ConfigInvalid);
    CHECK_THROWS_AS(ExperimentConfig::defaults().str("missing"), ConfigInvalid);
  }

  TEST_CASE("config file parsing") {
    std::string path = "test_config.tmp";
    {
      std::ofstream out(path);
      out << "# comment line\n";
      out << "seed = 99   # trailing comment\n";
      out << "radii = 1,2,4\n";
    }
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.load_file(path);
    CHECK(cfg.u64("seed") == 99);
    CHECK(cfg.i64_list("radii") == std::vector<long long>{1, 2, 4});
    std::remove(path.c_str());

    {
      std::ofstream out(path);
      out << "seed 99\n";
    }
    ExperimentConfig bad = ExperimentConfig::defaults();
    CHECK_THROWS_AS(bad.load_file(path), ConfigInvalid);
    std::remove(path.c_str());
    CHECK_THROWS_AS(bad.load_file("no_such_file.cfg"), ConfigInvalid);
  }

  TEST_CASE("number formatting is stable") {
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(-0.0) == "0");
    CHECK(format_real(1.5) == "1.5");
    CHECK(format_real(1.0 / 3.0) == "0.333333333333");
    CHECK(format_int(-42) == "-42");
  }

  TEST_CASE("unknown preset is rejected") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    CHECK_THROWS_AS(run_preset("no-such-preset", cfg, "report_out.tmp"), UnknownPreset);
  }

  TEST_CASE("preset reruns are byte-identical") {
    ExperimentConfig cfg = tiny_count_config();
    PresetOutcome a = run_preset("count", cfg, "report_out_a.tmp");
    PresetOutcome b = run_preset("count", cfg, "report_out_b.tmp");
    CHECK(slurp(a.csv_path) == slurp(b.csv_path));
    CHECK(slurp(a.json_path) == slurp(b.json_path));
    CHECK(a.report.pass);

    std::string csv = slurp(a.csv_path);
    // config echo and seed are embedded
    CHECK(csv.find("# config.seed = 20240817") != std::string::npos);
    CHECK(csv.find("# config.radii = 2,4,8") != std::string::npos);
    CHECK(csv.find("radius,count") != std::string::npos);
    CHECK(csv.find("# pass = true") != std::string::npos);
    std::string json = slurp(a.json_path);
    CHECK(json.find("\"preset\": \"count\"") != std::string::npos);
    CHECK(json.find("\"seed\": \"20240817\"") != std::string::npos);
  }

  TEST_CASE("csv and json carry identical numeric cells") {
    ExperimentConfig cfg = tiny_count_config();
    PresetOutcome outcome = run_preset("count", cfg, "report_out_c.tmp");
    std::string json = slurp(outcome.json_path);
    for (const auto& row : outcome.report.table.rows)
      for (const auto& cell : row) CHECK(json.find(cell) != std::string::npos);
    std::string csv = slurp(outcome.csv_path);
    for (const auto& row : outcome.report.table.rows)
      for (const auto& cell : row) CHECK(csv.find(cell) != std::string::npos);
  }

  TEST_CASE("empty tables produce a valid header-only artifact") {
    Report rep;
    rep.preset = "empty";
    rep.table.columns = {{"a", CellType::Integer}, {"b", CellType::Real}};
    rep.add_summary_int("rows", 0);
    write_csv(rep, "empty_report.tmp.csv");
    write_json(rep, "empty_report.tmp.json");
    std::string csv = slurp("empty_report.tmp.csv");
    CHECK(csv.find("a,b\n") != std::string::npos);
    std::string json = slurp("empty_report.tmp.json");
    CHECK(json.find("\"rows\": []") != std::string::npos);
    std::remove("empty_report.tmp.csv");
    std::remove("empty_report.tmp.json");
  }

  TEST_CASE("exit code mapping") {
    CHECK(exit_code_for(BudgetExceeded("x")) == 3);
    CHECK(exit_code_for(UnknownPreset("x")) == 4);
    CHECK(exit_code_for(ConfigInvalid("x")) == 4);
    CHECK(exit_code_for(IoError("x")) == 4);
    CHECK(exit_code_for(SyntaxError("x")) == 4);
    CHECK(exit_code_for(RoundingUnsafe("x")) == 2);
    CHECK(exit_code_for(NonconvergentShell("x")) == 2);
    CHECK(exit_code_for(DegenerateFit("x")) == 2);
  }

  TEST_CASE("a failing threshold flips the pass flag") {
    ExperimentConfig cfg = tiny_count_config();
    cfg.set("count_slope_min", "3.9");  // unreachable at these radii
    PresetOutcome outcome = run_preset("count", cfg, "report_out_d.tmp");
    CHECK_FALSE(outcome.report.pass);
    CHECK(!outcome.report.failures.empty());
    std::string csv = slurp(outcome.csv_path);
    CHECK(csv.find("# pass = false") != std::string::npos);
  }
}
