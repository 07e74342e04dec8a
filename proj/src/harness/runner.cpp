#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "ropbench/error.hpp"
#include "ropbench/harness.hpp"

namespace ropbench {

namespace {

TrialRecord run_trial(const ExperimentInfo& info, const ExperimentConfig& config, std::size_t t) {
  TrialRecord rec;
  rec.trial = t;
  rec.seed = CounterRng::derive_seed(config.seed, t);
  CounterRng rng = CounterRng::stream(config.seed, t);
  try {
    TrialOutcome out = info.run(config, rng);
    if (out.stats.size() != info.stat_names.size()) throw PreconditionError("trial returned the wrong number of statistics");
    rec.stats = std::move(out.stats);
    rec.hits = out.hits;
    rec.tries = out.tries;
    rec.law_ok = out.law_ok;
  } catch (const Error& e) {
    rec.error = e.what();
    if (rec.error.empty()) rec.error = "error";
  } catch (const std::bad_alloc&) {
    rec.error = "out of memory";
  } catch (const std::exception& e) {
    rec.error = std::string("internal: ") + e.what();
  }
  return rec;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.trials == 0) throw InvalidParamsError("trials must be at least 1");
  const ExperimentInfo& info = find_experiment(config.experiment);
  const auto start = std::chrono::steady_clock::now();

  ExperimentReport rep;
  rep.config = config;
  rep.stat_names = info.stat_names;
  rep.has_law = info.has_law;
  rep.records.resize(config.trials);

  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.trials);
  if (threads <= 1) {
    for (std::size_t t = 0; t < config.trials; ++t) rep.records[t] = run_trial(info, config, t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < config.trials; t = next++) rep.records[t] = run_trial(info, config, t);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Fold in trial order.
  const std::size_t k = info.stat_names.size();
  std::vector<double> sums(k, 0.0);
  std::size_t valid = 0;
  for (const auto& r : rep.records) {
    if (r.errored()) {
      ++rep.errors;
      continue;
    }
    ++valid;
    if (!r.law_ok) ++rep.violations;
    for (std::size_t i = 0; i < k; ++i) sums[i] += static_cast<double>(r.stats[i]);
  }
  if (rep.errors * 10 > config.trials) {
    throw AllTrialsErroredError(std::to_string(rep.errors) + " of " + std::to_string(config.trials) + " trials of " +
                                config.experiment + " errored; first: " +
                                std::find_if(rep.records.begin(), rep.records.end(), [](const TrialRecord& r) {
                                  return r.errored();
                                })->error);
  }
  rep.stat_means.assign(k, 0.0);
  if (valid) {
    for (std::size_t i = 0; i < k; ++i) rep.stat_means[i] = sums[i] / static_cast<double>(valid);
    rep.estimate = estimate_probability(rep.records);
    rep.has_estimate = true;
  }
  rep.law_pass = rep.violations == 0;
  switch (config.verdict) {
    case VerdictKind::AtLeast: rep.probability_pass = rep.has_estimate && rep.estimate.p_hat >= config.target; break;
    case VerdictKind::AtMost: rep.probability_pass = rep.has_estimate && rep.estimate.p_hat <= config.target; break;
    case VerdictKind::ExactLaw:
    case VerdictKind::Informational: rep.probability_pass = true; break;
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace ropbench
