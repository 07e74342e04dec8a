#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ropbench/error.hpp"
#include "ropbench/harness.hpp"

using namespace ropbench;

namespace {

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

ExperimentConfig small_config(const std::string& name, std::size_t trials = 20, std::uint64_t seed = 3) {
  ExperimentConfig c = preset_config("desk-small", name);
  c.trials = trials;
  c.seed = seed;
  return c;
}

// Wilson interval written out from the score formula.
std::pair<double, double> wilson_oracle(double s, double n) {
  const double z = 1.959963984540054, p = s / n;
  const double center = (p + z * z / (2 * n)) / (1 + z * z / n);
  const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return {center - half, center + half};
}

}  // namespace

TEST_CASE("Wilson interval") {
  auto zero = wilson(0, 100);
  CHECK(zero.p_hat == 0.0);
  CHECK(zero.low == doctest::Approx(0.0).epsilon(1e-12));
  auto all = wilson(100, 100);
  CHECK(all.p_hat == 1.0);
  CHECK(all.high == doctest::Approx(1.0));
  auto half = wilson(50, 100);
  CHECK(half.p_hat == 0.5);
  CHECK(std::abs(half.radius - 0.097) < 0.001);
  for (auto [s, n] : std::vector<std::pair<int, int>>{{0, 100}, {3, 17}, {50, 100}, {999, 1000}, {1, 1}}) {
    auto w = wilson(s, n);
    auto [lo, hi] = wilson_oracle(s, n);
    CHECK(w.low == doctest::Approx(lo));
    CHECK(w.high == doctest::Approx(hi));
    CHECK(w.radius == doctest::Approx((hi - lo) / 2));
  }
  CHECK_THROWS(wilson(0, 0));
}

TEST_CASE("verdict kinds and exit codes") {
  for (auto k : {VerdictKind::ExactLaw, VerdictKind::AtLeast, VerdictKind::AtMost, VerdictKind::Informational}) {
    CHECK(parse_verdict_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_verdict_kind("sometimes"), InvalidParamsError);
  ExperimentReport r;
  CHECK(r.exit_code() == 0);
  r.probability_pass = false;
  CHECK(r.exit_code() == 3);
  r.law_pass = false;
  CHECK(r.exit_code() == 2);
}

TEST_CASE("registry and presets cover the same experiments") {
  std::set<std::string> names;
  for (const auto& e : experiment_registry()) {
    CHECK(names.insert(e.name).second);
    CHECK_FALSE(e.stat_names.empty());
  }
  CHECK(names.size() == 17);
  CHECK_THROWS_AS(find_experiment("no-such-thing"), InvalidParamsError);
  for (const char* preset : {"desk-small", "desk-medium", "desk-large"}) {
    auto file = load_preset_file(preset);
    CHECK(file.at("experiments").size() == names.size());
    for (const auto& n : names) {
      ExperimentConfig c = preset_config(preset, n);
      CHECK(c.experiment == n);
      CHECK(c.preset == preset);
      CHECK(c.trials > 0);
    }
  }
  CHECK_THROWS_AS(load_preset_file("missing-preset"), InvalidParamsError);
}

TEST_CASE("config JSON round-trip and validation") {
  ExperimentConfig c = small_config("plin-rank");
  c.params["mprime"] = 4;
  c.verdict = VerdictKind::AtLeast;
  c.target = 0.25;
  ExperimentConfig back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
  CHECK(config_to_json(back).dump() == config_to_json(c).dump());
  CHECK(back.param_int("mprime", 0) == 4);
  CHECK(back.param_double("missing", 1.5) == 1.5);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"trials", 3}}), InvalidParamsError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"experiment", "x"}, {"trials", 0}}), InvalidParamsError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"experiment", "x"}, {"params", 3}}), InvalidParamsError);
  ExperimentConfig bad = c;
  bad.params["mprime"] = "four";
  CHECK_THROWS_AS(bad.param_int("mprime", 0), InvalidParamsError);
}

TEST_CASE("CSV layout") {
  ExperimentReport empty;
  empty.config.experiment = "ybound";
  empty.stat_names = {"a", "b"};
  CHECK(report_csv(empty) == "experiment,name,seed,trial,N,m,n,kappa,stat1,stat2,event,error\n");

  ExperimentReport r = run_experiment(small_config("ybound", 3));
  std::string csv = report_csv(r);
  CHECK(lines(csv) == 4);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("ybound,desk-small," + std::to_string(CounterRng::derive_seed(3, 0)) + ",0,", 0) == 0);
}

TEST_CASE("report JSON round-trip") {
  ExperimentReport r = run_experiment(small_config("census-bound", 10));
  ExperimentReport back = report_from_json(nlohmann::json::parse(report_json(r).dump()));
  CHECK(report_json(back).dump() == report_json(r).dump());
  CHECK(report_csv(back) == report_csv(r));
  CHECK_THROWS_AS(report_from_json(nlohmann::json{{"config", 1}}), InvalidParamsError);
}

TEST_CASE("runs are deterministic across thread counts") {
  for (const char* name : {"census-bound", "plin-rank", "swap-dichotomy", "a-prime-mean"}) {
    ExperimentConfig c = small_config(name, 24, 11);
    c.threads = 1;
    const std::string one = report_csv(run_experiment(c));
    c.threads = 4;
    CHECK(report_csv(run_experiment(c)) == one);
    c.seed = 12;
    CHECK(report_csv(run_experiment(c)) != one);
  }
}

TEST_CASE("trial errors are recorded, and too many abort") {
  ExperimentConfig c = small_config("plin-rank", 10);
  c.params["mprime"] = 1000;
  CHECK_THROWS_AS(run_experiment(c), AllTrialsErroredError);

  std::vector<TrialRecord> recs(3);
  recs[0].error = "boom";
  recs[1].hits = 1;
  recs[1].tries = 1;
  recs[2].tries = 1;
  auto w = estimate_probability(recs);
  CHECK(w.total == 2);
  CHECK(w.successes == 1);
  recs[1].error = recs[2].error = "x";
  CHECK_THROWS_AS(estimate_probability(recs), AllTrialsErroredError);

  ExperimentReport r;
  r.config.experiment = "ybound";
  r.stat_names = {"s"};
  r.records = {TrialRecord{0, 5, {}, 0, 0, true, "bad, \"quoted\""}};
  CHECK(report_csv(r).find(",,,\"bad, \"\"quoted\"\"\"\n") != std::string::npos);
}

TEST_CASE("verdicts follow the estimate") {
  ExperimentConfig c = small_config("g-balance-rank", 20);
  c.verdict = VerdictKind::AtLeast;
  c.target = 0.5;
  auto r = run_experiment(c);
  CHECK(r.has_estimate);
  CHECK(r.probability_pass == (r.estimate.p_hat >= 0.5));
  c.verdict = VerdictKind::AtMost;
  c.target = -1;
  CHECK(run_experiment(c).exit_code() == 3);
}

TEST_CASE("write_report names files by experiment, preset and seed") {
  auto dir = std::filesystem::temp_directory_path() / "ropbench-test-report";
  std::filesystem::remove_all(dir);
  ExperimentReport r = run_experiment(small_config("qgood", 4, 9));
  std::string csv = write_report(r, dir.string());
  CHECK(std::filesystem::path(csv).filename() == "qgood-desk-small-9.csv");
  CHECK(std::filesystem::exists(dir / "qgood-desk-small-9.json"));
  std::ifstream in(csv);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == report_csv(r));
  std::filesystem::remove_all(dir);
}

TEST_CASE("every experiment runs on the small preset") {
  for (const auto& e : experiment_registry()) {
    CAPTURE(e.name);
    auto r = run_experiment(small_config(e.name, 4));
    CHECK(r.errors == 0);
    CHECK(r.records.size() == 4);
    for (const auto& rec : r.records) CHECK(rec.stats.size() == e.stat_names.size());
  }
}
