#include <filesystem>
#include <fstream>
#include <sstream>

#include "ropbench/error.hpp"
#include "ropbench/harness.hpp"

namespace ropbench {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "experiment,name,seed,trial,N,m,n,kappa";
  for (std::size_t i = 1; i <= r.stat_names.size(); ++i) out << ",stat" << i;
  out << ",event,error\n";
  const auto& c = r.config;
  const std::string prefix = csv_field(c.experiment) + "," + csv_field(c.preset) + ",";
  const std::string dims = std::to_string(c.d.N) + "," + std::to_string(c.d.m) + "," + std::to_string(c.d.n) + "," +
                           std::to_string(c.d.kappa);
  for (const auto& rec : r.records) {
    out << prefix << rec.seed << ',' << rec.trial << ',' << dims;
    if (rec.errored()) {
      for (std::size_t i = 0; i < r.stat_names.size(); ++i) out << ',';
      out << ",," << csv_field(rec.error) << '\n';
      continue;
    }
    for (auto v : rec.stats) out << ',' << v;
    out << ',' << rec.hits << ",\n";
  }
  return out.str();
}

nlohmann::ordered_json report_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.config.experiment;
  j["name"] = r.config.preset;
  j["config"] = config_to_json(r.config);
  j["stat_names"] = r.stat_names;
  j["trials"] = r.records.size();
  j["errors"] = r.errors;
  j["violations"] = r.violations;
  j["has_law"] = r.has_law;
  if (r.has_estimate) {
    j["estimate"] = {{"successes", r.estimate.successes}, {"total", r.estimate.total}, {"p_hat", r.estimate.p_hat},
                     {"radius", r.estimate.radius},       {"low", r.estimate.low},     {"high", r.estimate.high}};
  } else {
    j["estimate"] = nullptr;
  }
  j["stat_means"] = r.stat_means;
  j["verdict"] = {{"kind", to_string(r.config.verdict)},
                  {"target", r.config.target},
                  {"law_pass", r.law_pass},
                  {"probability_pass", r.probability_pass},
                  {"exit_code", r.exit_code()}};
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  auto& recs = j["records"] = nlohmann::ordered_json::array();
  for (const auto& rec : r.records) {
    nlohmann::ordered_json o;
    o["trial"] = rec.trial;
    o["seed"] = rec.seed;
    o["stats"] = rec.stats;
    o["hits"] = rec.hits;
    o["tries"] = rec.tries;
    o["law_ok"] = rec.law_ok;
    o["error"] = rec.error;
    recs.push_back(std::move(o));
  }
  return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  try {
    ExperimentReport r;
    r.config = config_from_json(j.at("config"));
    r.stat_names = j.at("stat_names").get<std::vector<std::string>>();
    r.errors = j.at("errors").get<std::size_t>();
    r.violations = j.at("violations").get<std::size_t>();
    r.has_law = j.at("has_law").get<bool>();
    const auto& e = j.at("estimate");
    r.has_estimate = !e.is_null();
    if (r.has_estimate) {
      r.estimate.successes = e.at("successes").get<std::uint64_t>();
      r.estimate.total = e.at("total").get<std::uint64_t>();
      r.estimate.p_hat = e.at("p_hat").get<double>();
      r.estimate.radius = e.at("radius").get<double>();
      r.estimate.low = e.at("low").get<double>();
      r.estimate.high = e.at("high").get<double>();
    }
    r.stat_means = j.at("stat_means").get<std::vector<double>>();
    r.law_pass = j.at("verdict").at("law_pass").get<bool>();
    r.probability_pass = j.at("verdict").at("probability_pass").get<bool>();
    r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    for (const auto& o : j.at("records")) {
      TrialRecord rec;
      rec.trial = o.at("trial").get<std::size_t>();
      rec.seed = o.at("seed").get<std::uint64_t>();
      rec.stats = o.at("stats").get<std::vector<std::int64_t>>();
      rec.hits = o.at("hits").get<std::uint64_t>();
      rec.tries = o.at("tries").get<std::uint64_t>();
      rec.law_ok = o.at("law_ok").get<bool>();
      rec.error = o.at("error").get<std::string>();
      r.records.push_back(std::move(rec));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParamsError(std::string("malformed report: ") + e.what());
  }
}

std::string write_report(const ExperimentReport& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir + ": " + ec.message());
  const std::string stem = r.config.experiment + "-" + (r.config.preset.empty() ? "custom" : r.config.preset) + "-" +
                           std::to_string(r.config.seed);
  const auto base = std::filesystem::path(dir) / stem;
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + p.string());
  };
  const auto csv = base.string() + ".csv";
  write(csv, report_csv(r));
  write(base.string() + ".json", report_json(r).dump(2) + "\n");
  return csv;
}

}  // namespace ropbench
