#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ropbench/error.hpp"
#include "ropbench/harness.hpp"

#ifndef ROPBENCH_PRESET_DIR
#define ROPBENCH_PRESET_DIR "presets"
#endif

namespace ropbench {

namespace {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    c.experiment = j.at("experiment").get<std::string>();
    c.preset = get_or<std::string>(j, "name", "");
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    c.trials = get_or<std::size_t>(j, "trials", 100);
    c.threads = get_or<std::size_t>(j, "threads", 0);
    if (j.contains("d")) {
      const auto& d = j.at("d");
      c.d.N = get_or<std::uint64_t>(d, "N", 0);
      c.d.m = get_or<std::uint64_t>(d, "m", 0);
      c.d.n = get_or<std::uint64_t>(d, "n", 0);
      c.d.kappa = get_or<std::uint64_t>(d, "kappa", 0);
    }
    if (j.contains("params")) {
      if (!j.at("params").is_object()) throw InvalidParamsError("'params' must be an object");
      c.params = j.at("params");
    }
    if (j.contains("verdict")) {
      const auto& v = j.at("verdict");
      c.verdict = parse_verdict_kind(v.at("kind").get<std::string>());
      c.target = get_or<double>(v, "target", 0.0);
    }
    if (c.trials == 0) throw InvalidParamsError("trials must be at least 1");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParamsError(std::string("malformed experiment config: ") + e.what());
  }
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = c.experiment;
  j["name"] = c.preset;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["threads"] = c.threads;
  j["d"] = {{"N", c.d.N}, {"m", c.d.m}, {"n", c.d.n}, {"kappa", c.d.kappa}};
  j["params"] = nlohmann::ordered_json::parse(c.params.dump());
  j["verdict"] = {{"kind", to_string(c.verdict)}, {"target", c.target}};
  return j;
}

std::vector<std::string> preset_search_path() {
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("ROPBENCH_PRESET_DIR"); env && *env) dirs.emplace_back(env);
  dirs.emplace_back(ROPBENCH_PRESET_DIR);
  return dirs;
}

nlohmann::json load_preset_file(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  fs::path path;
  if (name_or_path.find('/') != std::string::npos || fs::path(name_or_path).extension() == ".json") {
    path = name_or_path;
  } else {
    for (const auto& dir : preset_search_path()) {
      fs::path p = fs::path(dir) / (name_or_path + ".json");
      if (fs::exists(p)) {
        path = p;
        break;
      }
    }
    if (path.empty()) throw InvalidParamsError("preset '" + name_or_path + "' not found");
  }
  std::ifstream in(path);
  if (!in) throw InvalidParamsError("cannot read preset " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParamsError("preset " + path.string() + ": " + e.what());
  }
}

ExperimentConfig preset_config(const std::string& name_or_path, const std::string& experiment) {
  const auto file = load_preset_file(name_or_path);
  if (!file.contains("experiments") || !file.at("experiments").contains(experiment)) {
    throw InvalidParamsError("preset '" + name_or_path + "' has no entry for " + experiment);
  }
  nlohmann::json entry = file.at("experiments").at(experiment);
  entry["experiment"] = experiment;
  if (!entry.contains("name")) entry["name"] = get_or<std::string>(file, "name", name_or_path);
  return config_from_json(entry);
}

}  // namespace ropbench
