#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ropbench/partition.hpp"
#include "ropbench/rng.hpp"

namespace ropbench {

// ------------------------------------------------------------ statistics

struct WilsonEstimate {
  std::uint64_t successes = 0;
  std::uint64_t total = 0;
  double p_hat = 0;
  double radius = 0;  // half-width of the 95% Wilson interval
  double low = 0, high = 0;
};

// 95% Wilson score interval. total must be positive.
WilsonEstimate wilson(std::uint64_t successes, std::uint64_t total);

// ------------------------------------------------------------ experiments

enum class VerdictKind { ExactLaw, AtLeast, AtMost, Informational };
const char* to_string(VerdictKind k);
VerdictKind parse_verdict_kind(std::string_view s);

struct ExperimentConfig {
  std::string experiment;  // registry name
  std::string preset;      // label written to the name column
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::size_t threads = 0;  // 0: hardware concurrency
  DParams d{};              // fields unused by an experiment stay 0
  nlohmann::json params = nlohmann::json::object();
  VerdictKind verdict = VerdictKind::Informational;
  double target = 0;  // probability threshold for AtLeast / AtMost

  // Typed lookups into params with a default.
  std::int64_t param_int(const std::string& key, std::int64_t fallback) const;
  double param_double(const std::string& key, double fallback) const;
};

// Outcome of a single trial. `law_ok` is false when an exact law is violated.
// The probability estimate pools hits / tries over all trials; a plain event
// trial has tries = 1 and hits = event.
struct TrialOutcome {
  std::vector<std::int64_t> stats;
  std::uint64_t hits = 0;
  std::uint64_t tries = 1;
  bool law_ok = true;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;  // key of the trial's stream
  std::vector<std::int64_t> stats;
  std::uint64_t hits = 0;
  std::uint64_t tries = 0;
  bool law_ok = true;
  std::string error;  // non-empty when the trial threw

  bool errored() const { return !error.empty(); }
};

using TrialFn = std::function<TrialOutcome(const ExperimentConfig&, CounterRng&)>;

struct ExperimentInfo {
  std::string name;
  std::string statistic;  // what the event / law measures
  std::vector<std::string> stat_names;
  bool has_law = false;   // trials check an exact law
  TrialFn run;
};

const std::vector<ExperimentInfo>& experiment_registry();
// Throws InvalidParamsError for an unknown name.
const ExperimentInfo& find_experiment(std::string_view name);

// ------------------------------------------------------------ reports

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> stat_names;
  std::vector<TrialRecord> records;  // in trial order
  std::size_t errors = 0;
  std::size_t violations = 0;
  bool has_law = false;
  bool has_estimate = false;  // false when every trial errored
  WilsonEstimate estimate;
  std::vector<double> stat_means;  // over non-errored trials
  bool law_pass = true;
  bool probability_pass = true;
  double wall_clock_seconds = 0;

  // 0 pass, 2 exact-law violation, 3 probability verdict fail.
  int exit_code() const;
};

// Pooled estimate over non-errored records. Throws AllTrialsErroredError.
WilsonEstimate estimate_probability(std::span<const TrialRecord> records);

// Runs all trials (in parallel when threads != 1). Trial t draws from
// CounterRng::stream(derive_seed(seed, t)). Throws AllTrialsErroredError if
// more than 10% of the trials error.
ExperimentReport run_experiment(const ExperimentConfig& config);

// CSV: experiment,name,seed,trial,N,m,n,kappa,stat1..statk,event,error
std::string report_csv(const ExperimentReport& r);
nlohmann::ordered_json report_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);
// Writes <dir>/<experiment>-<preset>-<seed>.csv and .json; returns the CSV path.
std::string write_report(const ExperimentReport& r, const std::string& dir);

// ------------------------------------------------------------ presets

// Parses the configuration schema described in docs/config.md.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& c);

// `name_or_path` is a file path, or a preset name looked up as
// <dir>/<name>.json in $ROPBENCH_PRESET_DIR and then the installed preset
// directory. A preset file maps experiment names to configurations.
nlohmann::json load_preset_file(const std::string& name_or_path);
ExperimentConfig preset_config(const std::string& name_or_path, const std::string& experiment);
std::vector<std::string> preset_search_path();

}  // namespace ropbench
