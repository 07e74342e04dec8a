#include <cmath>

#include "ropbench/error.hpp"
#include "ropbench/harness.hpp"

namespace ropbench {

WilsonEstimate wilson(std::uint64_t successes, std::uint64_t total) {
  if (total == 0) throw InvalidParamsError("Wilson interval needs at least one trial");
  if (successes > total) throw InvalidParamsError("more successes than trials");
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  WilsonEstimate w;
  w.successes = successes;
  w.total = total;
  w.p_hat = p;
  w.radius = half;
  w.low = std::max(0.0, center - half);
  w.high = std::min(1.0, center + half);
  return w;
}

WilsonEstimate estimate_probability(std::span<const TrialRecord> records) {
  std::uint64_t hits = 0, tries = 0;
  for (const auto& r : records) {
    if (r.errored()) continue;
    hits += r.hits;
    tries += r.tries;
  }
  if (tries == 0) throw AllTrialsErroredError("no trial produced a result");
  return wilson(hits, tries);
}

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::ExactLaw: return "exact_law";
    case VerdictKind::AtLeast: return "at_least";
    case VerdictKind::AtMost: return "at_most";
    case VerdictKind::Informational: return "informational";
  }
  return "?";
}

VerdictKind parse_verdict_kind(std::string_view s) {
  if (s == "exact_law") return VerdictKind::ExactLaw;
  if (s == "at_least") return VerdictKind::AtLeast;
  if (s == "at_most") return VerdictKind::AtMost;
  if (s == "informational") return VerdictKind::Informational;
  throw InvalidParamsError("unknown verdict kind '" + std::string(s) + "'");
}

int ExperimentReport::exit_code() const {
  if (!law_pass) return 2;
  if (!probability_pass) return 3;
  return 0;
}

}  // namespace ropbench
