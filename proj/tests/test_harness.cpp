#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "swiptsec/csv.hpp"
#include "swiptsec/harness.hpp"
#include "swiptsec/io.hpp"

using namespace swiptsec;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.trials = 3;
  cfg.base_seed = 11;
  cfg.sweeps = {{SweepAxis::GammaReqDb, {3, 9}}, {SweepAxis::KReceivers, {2, 5}}};
  return cfg;
}

std::string records_text(const SweepResult& r) {
  std::ostringstream os;
  write_records_csv(os, r.records);
  write_aggregate_csv(os, r.aggregates);
  return os.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("swiptsec_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("default experiment reproduces the simulation grid") {
  const ExperimentConfig cfg;
  REQUIRE(cfg.sweeps.size() == 2);
  CHECK(cfg.sweeps[0].grid == std::vector<double>{0, 3, 6, 9, 12});
  CHECK(cfg.sweeps[1].grid == std::vector<double>{2, 4, 6, 8});
  CHECK(cfg.schemes.size() == 5);
  CHECK_NOTHROW(cfg.validate());
  const auto p = cfg.params_at(SweepAxis::KReceivers, 8);
  CHECK(p.k_receivers == 8);
  CHECK(p.gamma_req == doctest::Approx(db_to_linear(9.0)));
  CHECK(cfg.params_at(SweepAxis::GammaReqDb, 3).gamma_req == doctest::Approx(db_to_linear(3.0)));
}

TEST_CASE("experiment validation") {
  ExperimentConfig cfg;
  cfg.trials = 0;
  CHECK_THROWS(cfg.validate());
  cfg = ExperimentConfig{};
  cfg.sweeps[0].grid.clear();
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("experiment JSON round trip and partial configs") {
  ExperimentConfig cfg = small_config();
  cfg.schemes = {SchemeKind::Sub1, SchemeKind::Baseline2};
  cfg.solver.solver_tol = 1e-8;
  const auto back = experiment_from_json(experiment_to_json(cfg));
  CHECK(back.trials == 3);
  CHECK(back.base_seed == 11);
  CHECK(back.schemes == cfg.schemes);
  CHECK(back.sweeps[1].grid == cfg.sweeps[1].grid);
  CHECK(back.solver.solver_tol == 1e-8);
  CHECK(back.params.p_pg == cfg.params.p_pg);

  const auto partial = experiment_from_json(R"({"trials": 7})");
  CHECK(partial.trials == 7);
  CHECK(partial.sweeps.size() == 2);
  CHECK_THROWS(experiment_from_json("{ not json"));
  CHECK_THROWS(experiment_from_json(R"({"schemes": ["nope"]})"));
}

TEST_CASE("sweeps are reproducible and independent of the thread count") {
  ExperimentConfig cfg = small_config();
  cfg.threads = 1;
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  cfg.threads = 4;
  const auto c = run_sweep(cfg);
  CHECK(records_text(a) == records_text(b));
  CHECK(records_text(a) == records_text(c));
  CHECK(a.records.size() == static_cast<std::size_t>(4 * 3 * 5));
}

TEST_CASE("trial seeds and record invariants") {
  const auto cfg = small_config();
  const auto recs = run_trial(cfg, SweepAxis::GammaReqDb, 9, 2);
  REQUIRE(recs.size() == cfg.schemes.size());
  for (const auto& r : recs) {
    CHECK(r.seed == (cfg.base_seed ^ 2u));
    if (r.solved()) {
      CHECK(std::isfinite(r.tx_power_dbm));
      CHECK(std::isfinite(r.total_harvested_dbm));
      CHECK(r.tx_power_dbm == doctest::Approx(watt_to_dbm(r.tx_power_w)));
    }
  }
}

TEST_CASE("secrecy capacity is pinned when the secrecy constraints bind") {
  const auto cfg = small_config();
  const auto res = run_sweep(cfg);
  int tight = 0;
  for (const auto& r : res.records) {
    if (!r.solved()) continue;
    const auto p = cfg.params_at(r.axis, r.axis_value);
    const double floor = std::log2(1.0 + p.gamma_req) - std::log2(1.1);
    CHECK(r.secrecy_capacity_bps_hz >= floor - 1e-6);
    if (r.secrecy_tight) {
      ++tight;
      CHECK(r.secrecy_capacity_bps_hz == doctest::Approx(floor).epsilon(1e-3));
    }
  }
  CHECK(tight > 0);
}

TEST_CASE("an all-infeasible point is marked empty") {
  ExperimentConfig cfg = small_config();
  cfg.params.p_max = 1e-6;
  cfg.sweeps = {{SweepAxis::GammaReqDb, {9}}};
  const auto res = run_sweep(cfg);
  for (const auto& a : res.aggregates) {
    CHECK(a.empty);
    CHECK(a.solved == 0);
    CHECK(a.feasibility_rate == 0.0);
  }
  std::ostringstream os;
  write_aggregate_csv(os, res.aggregates);
  CHECK(os.str().find("nan") == std::string::npos);
}

TEST_CASE("pairwise sum is exact on small integers and order-fixed") {
  std::vector<double> x(1001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  CHECK(pairwise_sum(x.data(), x.size()) == 500500.0);
  CHECK(pairwise_sum(x.data(), 0) == 0.0);
}

TEST_CASE("CSV quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(format_number(1234567.0) == "1.23457e+06");
  CHECK(format_number(std::nan("")).empty());
}

TEST_CASE("empty record list gives a header-only file") {
  const auto dir = temp_dir("empty");
  emit_csv({}, dir / "r.csv");
  std::ifstream in(dir / "r.csv");
  const auto rows = parse_csv(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == record_columns());
}

TEST_CASE("column order is fixed") {
  const std::vector<std::string> expect = {"sweep", "axis_value", "trial", "seed", "scheme", "status",
                                           "provenance", "tx_power_dbm", "secrecy_capacity_bps_hz",
                                           "total_harvested_dbm", "rho", "rank_one", "rank_ratio",
                                           "prop1_condition", "secrecy_tight", "detail"};
  CHECK(record_columns() == expect);
  auto timed = expect;
  timed.push_back("solve_ms");
  CHECK(record_columns(true) == timed);
}

TEST_CASE("CSV parse-back recovers the records") {
  ExperimentConfig cfg = small_config();
  cfg.sweeps = {{SweepAxis::GammaReqDb, {6}}};
  auto res = run_sweep(cfg);
  res.records.front().detail = "odd, \"quoted\"\ntext";
  std::stringstream ss;
  write_records_csv(ss, res.records);
  const auto rows = parse_csv(ss);
  REQUIRE(rows.size() == res.records.size() + 1);
  const auto& cols = rows[0];
  auto col = [&](const std::string& n) {
    return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), n) - cols.begin());
  };
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const auto& r = res.records[i];
    const auto& row = rows[i + 1];
    REQUIRE(row.size() == cols.size());
    CHECK(std::stoull(row[col("seed")]) == r.seed);
    CHECK(row[col("scheme")] == to_string(r.scheme));
    CHECK(row[col("detail")] == r.detail);
    if (r.solved()) {
      CHECK(std::stod(row[col("tx_power_dbm")]) == doctest::Approx(r.tx_power_dbm).epsilon(1e-5));
      CHECK(std::stod(row[col("secrecy_capacity_bps_hz")]) ==
            doctest::Approx(r.secrecy_capacity_bps_hz).epsilon(1e-5));
      CHECK(std::stod(row[col("rho")]) == doctest::Approx(r.rho).epsilon(1e-5));
    }
  }
}

TEST_CASE("CSV reader edge cases") {
  std::istringstream crlf("a,b\r\n1,\"x\r\ny\"\r\n");
  const auto rows = parse_csv(crlf);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][1] == "x\r\ny");
  std::istringstream bad("\"open");
  CHECK_THROWS(parse_csv(bad));
  std::istringstream no_newline("1,2");
  CHECK(parse_csv(no_newline).size() == 1);
}

TEST_CASE("figure files come from the sweeps") {
  const auto cfg = small_config();
  const auto res = run_sweep(cfg);
  const auto dir = temp_dir("figs");
  const auto files = emit_figures(cfg, res, dir);
  CHECK(files.size() == 4);
  for (const char* f : {"fig2.csv", "fig3.csv", "fig4.csv", "fig5.csv"}) CHECK(std::filesystem::exists(dir / f));
  std::ifstream in(dir / "fig5.csv");
  const auto rows = parse_csv(in);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].front() == "k_receivers");
  CHECK(rows[0].size() == cfg.schemes.size() + 2);
}

TEST_CASE("unwritable path is reported with its name") {
  try {
    emit_csv({}, "/nonexistent_dir_for_tests/x.csv");
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent_dir_for_tests/x.csv") != std::string::npos);
  }
}

TEST_CASE("instance and solution JSON round trip") {
  Instance inst;
  inst.params = SystemParams::defaults(4, 3);
  inst.chan = draw_channel(inst.params, inst.config, 5);
  const Instance back = instance_from_json(instance_to_json(inst));
  CHECK(back.params.n_t == 4);
  CHECK(back.params.sigma_s2 == inst.params.sigma_s2);
  CHECK(back.chan.h == inst.chan.h);
  REQUIRE(back.chan.g.size() == 2);
  CHECK(back.chan.g[1] == inst.chan.g[1]);

  const auto r = run_scheme(SchemeKind::Scheme2, inst.params, inst.chan);
  const StoredSolution s = solution_from_json(solution_to_json(SchemeKind::Scheme2, r));
  CHECK(s.scheme == "scheme2");
  CHECK(s.solution.status == r.solution.status);
  CHECK(s.provenance == r.provenance);
  CHECK(s.solution.rho == r.solution.rho);
  CHECK((s.solution.W - r.solution.W).norm() == 0.0);
  CHECK(s.duals.has_value() == r.certificate.has_value());
  if (s.duals) {
    CHECK(s.duals->lambda == r.certificate->lambda);
    CHECK((s.duals->Y - r.certificate->Y).norm() == 0.0);
  }
}

TEST_CASE("params JSON accepts dB and broadcast scalars") {
  const auto p = params_from_json(R"({"k_receivers": 5, "gamma_req_db": 3, "gamma_tol": 0.05})");
  CHECK(p.k_receivers == 5);
  CHECK(p.gamma_req == doctest::Approx(db_to_linear(3.0)));
  CHECK(p.gamma_tol == std::vector<double>(4, 0.05));
  CHECK(p.p_min_k.size() == 4);
  CHECK_THROWS(params_from_json(R"({"eta": 2})"));
}
