#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ropbench/error.hpp"
#include "ropbench/hardpolys.hpp"
#include "ropbench/harness.hpp"
#include "ropbench/kernels.hpp"
#include "ropbench/partition.hpp"
#include "ropbench/rank.hpp"

using namespace ropbench;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParamsError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_summary(const ExperimentReport& r) {
  std::printf("%s [%s] seed=%llu trials=%zu errors=%zu\n", r.config.experiment.c_str(), r.config.preset.c_str(),
              static_cast<unsigned long long>(r.config.seed), r.records.size(), r.errors);
  if (r.has_estimate) {
    std::printf("  p_hat=%.6f  wilson95=[%.6f, %.6f]  radius=%.6f  (%llu/%llu)\n", r.estimate.p_hat, r.estimate.low,
                r.estimate.high, r.estimate.radius, static_cast<unsigned long long>(r.estimate.successes),
                static_cast<unsigned long long>(r.estimate.total));
  }
  for (std::size_t i = 0; i < r.stat_names.size(); ++i) {
    std::printf("  mean stat%zu %-16s %.6f\n", i + 1, r.stat_names[i].c_str(), r.stat_means[i]);
  }
  if (r.has_law) std::printf("  exact law: %zu violations\n", r.violations);
  std::printf("  verdict %s", to_string(r.config.verdict));
  if (r.config.verdict == VerdictKind::AtLeast || r.config.verdict == VerdictKind::AtMost) {
    std::printf(" %.6f", r.config.target);
  }
  std::printf(": %s\n", r.exit_code() == 0 ? "pass" : "FAIL");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial derivative rank experiments for read-once formulas"};
  app.require_subcommand(1);
  std::string simd = "auto";
  app.add_option("--simd", simd, "Kernel level: auto, scalar, avx2")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // partition
  auto* part = app.add_subcommand("partition", "Sample a partition and print it as JSON");
  std::string dist = "D";
  DParams dp;
  std::uint64_t pseed = 0;
  std::string universe = "x";
  part->add_option("--dist", dist, "D or DPrime")->check(CLI::IsMember({"D", "DPrime"}));
  part->add_option("--N", dp.N, "Number of variables")->required();
  part->add_option("--m", dp.m, "Y and Z weight (D)");
  part->add_option("--n", dp.n, "Grid side (D)");
  part->add_option("--kappa", dp.kappa, "Ones weight (D)");
  part->add_option("--seed", pseed, "Seed");
  part->add_option("--universe", universe, "x: x1..xN, grid: x{i}_{j} with N = n^2")->check(CLI::IsMember({"x", "grid"}));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a hard polynomial");
  std::string kind;
  std::size_t gN = 0, mprime = 0, gn = 0;
  std::uint64_t wseed = 0;
  gen->add_option("--kind", kind, "plin, g or perm")->required()->check(CLI::IsMember({"plin", "g", "perm"}));
  gen->add_option("--N", gN, "plin: variable count");
  gen->add_option("--mprime", mprime, "plin: number of linear forms");
  gen->add_option("--n", gn, "g: 2n variables; perm: n x n");
  gen->add_option("--wseed", wseed, "g: seed for the w substitution");

  // rank
  auto* rk = app.add_subcommand("rank", "Rank of the partial derivative matrix of a formula under a partition");
  std::string formula_text, formula_file, partition_file;
  bool show_matrix = false;
  rk->add_option("--formula", formula_text, "Formula text");
  rk->add_option("--formula-file", formula_file, "File with formula text");
  rk->add_option("--partition", partition_file, "Partition JSON file (omit for formulas already over y/z)");
  rk->add_flag("--matrix", show_matrix, "Also print the matrix as CSV (small rosters only)");

  // experiment
  auto* ex = app.add_subcommand("experiment", "Run a seeded experiment");
  std::string ename, preset, config_file, out_dir;
  std::optional<std::uint64_t> eseed;
  std::optional<std::size_t> trials, threads;
  std::optional<std::uint64_t> oN, om, on, okappa;
  ex->add_option("--name", ename, "Experiment name (optional with --config)");
  ex->add_option("--preset", preset, "Preset name or path");
  ex->add_option("--config", config_file, "Experiment config JSON (see docs/config.md)");
  ex->add_option("--seed", eseed, "Master seed");
  ex->add_option("--trials", trials, "Number of trials");
  ex->add_option("--threads", threads, "Worker threads (0: all cores)");
  ex->add_option("--N", oN);
  ex->add_option("--m", om);
  ex->add_option("--n", on);
  ex->add_option("--kappa", okappa);
  ex->add_option("--out", out_dir, "Directory for CSV and JSON reports");
  ex->get_option("--preset")->excludes(ex->get_option("--config"));

  auto* ls = app.add_subcommand("list", "List experiments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simd == "scalar") kernels::set_level(kernels::SimdLevel::Scalar);
    if (simd == "avx2") kernels::set_level(kernels::SimdLevel::Avx2);

    if (*part) {
      std::vector<Var> vars;
      if (universe == "grid") {
        std::size_t side = dp.n;
        if (side * side != dp.N) throw InvalidParamsError("--universe grid needs N = n^2");
        vars = grid_vars(side);
      } else {
        vars = x_vars(dp.N);
      }
      Partition phi = dist == "D" ? sample_d(dp, vars, pseed) : sample_d_prime(vars, pseed);
      std::cout << partition_to_json(phi) << "\n";
      return 0;
    }
    if (*gen) {
      if (kind == "plin") {
        std::cout << to_string(gen_plin(gN, mprime)) << "\n";
      } else if (kind == "g") {
        std::cout << dump(gen_g(gn, wseed));
      } else {
        std::cout << dump(gen_perm(gn).expand());
      }
      return 0;
    }
    if (*rk) {
      if (formula_text.empty() == formula_file.empty()) throw InvalidParamsError("give exactly one of --formula, --formula-file");
      Formula f = parse_formula(formula_file.empty() ? formula_text : read_file(formula_file), {true, {}});
      if (!partition_file.empty()) f = apply_partition(f, partition_from_json(read_file(partition_file)));
      std::cout << "rank " << formula_rank(f) << "\n";
      if (show_matrix) std::cout << to_csv(build_pd_matrix(expand(f)));
      return 0;
    }
    if (*ls) {
      for (const auto& e : experiment_registry()) {
        std::cout << e.name << (e.has_law ? "  [law] " : "  ") << e.statistic << "\n";
      }
      return 0;
    }
    if (*ex) {
      if (ename.empty() && config_file.empty()) throw InvalidParamsError("--name is required without --config");
      ExperimentConfig cfg;
      if (!preset.empty()) {
        cfg = preset_config(preset, ename);
      } else if (!config_file.empty()) {
        cfg = config_from_json(nlohmann::json::parse(read_file(config_file)));
        if (!ename.empty() && cfg.experiment != ename) {
          throw InvalidParamsError("config is for " + cfg.experiment + ", not " + ename);
        }
      } else {
        cfg.experiment = ename;
      }
      if (eseed) cfg.seed = *eseed;
      if (trials) cfg.trials = *trials;
      if (threads) cfg.threads = *threads;
      if (oN) cfg.d.N = *oN;
      if (om) cfg.d.m = *om;
      if (on) cfg.d.n = *on;
      if (okappa) cfg.d.kappa = *okappa;
      ExperimentReport rep = run_experiment(cfg);
      print_summary(rep);
      if (!out_dir.empty()) std::cout << "  wrote " << write_report(rep, out_dir) << "\n";
      return rep.exit_code();
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
