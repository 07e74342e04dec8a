#include "ropbench/partition.hpp"

#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "ropbench/error.hpp"

namespace ropbench {

std::string to_string(const Target& t) {
  switch (t.kind) {
    case TargetKind::Y: return "y" + std::to_string(t.index);
    case TargetKind::Z: return "z" + std::to_string(t.index);
    case TargetKind::Zero: return "0";
    case TargetKind::One: return "1";
  }
  return "?";
}

Target parse_target(std::string_view text) {
  if (text == "0") return Target::zero();
  if (text == "1") return Target::one();
  Var v = parse_var(text);
  if (v.side == Side::X || v.is_grid()) throw InvalidParamsError("bad partition target '" + std::string(text) + "'");
  return v.side == Side::Y ? Target::y(v.index) : Target::z(v.index);
}

const char* to_string(Distribution d) {
  switch (d) {
    case Distribution::DPrime: return "DPrime";
    case Distribution::D: return "D";
    case Distribution::Explicit: return "Explicit";
  }
  return "?";
}

Distribution parse_distribution(std::string_view text) {
  if (text == "DPrime") return Distribution::DPrime;
  if (text == "D") return Distribution::D;
  if (text == "Explicit") return Distribution::Explicit;
  throw InvalidParamsError("unknown distribution '" + std::string(text) + "'");
}

void DParams::validate() const {
  if (N == 0) throw InvalidParamsError("N must be positive");
  // overflow-safe form of 2m + kappa*n <= N
  if (m > N / 2 || (n != 0 && kappa > (N - 2 * m) / n)) {
    throw InvalidParamsError("probabilities exceed 1: 2m + kappa*n = " + std::to_string(2 * m) + " + " +
                             std::to_string(kappa) + "*" + std::to_string(n) + " > N = " + std::to_string(N));
  }
}

DParams DParams::asymptotic_defaults(std::uint64_t N) {
  DParams p;
  p.N = N;
  p.m = static_cast<std::uint64_t>(std::llround(std::cbrt(static_cast<double>(N))));
  p.n = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(N))));
  double lg = p.n > 0 ? std::log2(static_cast<double>(p.n)) : 0.0;
  p.kappa = static_cast<std::uint64_t>(std::ceil(20.0 * lg));
  p.validate();
  if (!(2 * p.m < p.kappa * p.n)) throw InvalidParamsError("regime 2m < kappa*n fails for N=" + std::to_string(N));
  return p;
}

Partition::Partition(std::vector<Var> universe, std::vector<Target> targets, Distribution dist, std::uint64_t seed)
    : universe_(std::move(universe)), targets_(std::move(targets)), dist_(dist), seed_(seed) {
  if (universe_.size() != targets_.size()) throw PreconditionError("universe and targets differ in length");
  index_.reserve(universe_.size());
  std::unordered_set<Var> used;
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (!index_.emplace(universe_[i], i).second) {
      throw DuplicateVariableError("variable " + to_string(universe_[i]) + " assigned twice");
    }
    const Target& t = targets_[i];
    if (t.is_variable()) {
      if (t.index == 0) throw InvalidParamsError("target index must be positive");
      if (!used.insert(t.as_var()).second) {
        throw InvalidParamsError("target " + to_string(t) + " used twice; partition must be injective on Y and Z");
      }
    }
  }
}

const Target* Partition::find(const Var& v) const {
  auto it = index_.find(v);
  return it == index_.end() ? nullptr : &targets_[it->second];
}

const Target& Partition::at(const Var& v) const {
  const Target* t = find(v);
  if (!t) throw UnassignedVariableError("partition does not assign " + to_string(v));
  return *t;
}

namespace {

Partition number_targets(std::span<const Var> universe, const std::vector<TargetKind>& kinds, Distribution dist,
                         std::uint64_t seed) {
  std::vector<Target> targets(kinds.size());
  std::uint32_t ny = 0, nz = 0;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    switch (kinds[i]) {
      case TargetKind::Y: targets[i] = Target::y(++ny); break;
      case TargetKind::Z: targets[i] = Target::z(++nz); break;
      case TargetKind::One: targets[i] = Target::one(); break;
      case TargetKind::Zero: targets[i] = Target::zero(); break;
    }
  }
  return Partition(std::vector<Var>(universe.begin(), universe.end()), std::move(targets), dist, seed);
}

}  // namespace

Partition sample_d_prime(std::span<const Var> universe, CounterRng& rng) {
  std::vector<TargetKind> kinds(universe.size());
  for (auto& k : kinds) k = rng.coin() ? TargetKind::Z : TargetKind::Y;
  return number_targets(universe, kinds, Distribution::DPrime, rng.key());
}

Partition sample_d(const DParams& params, std::span<const Var> universe, CounterRng& rng) {
  params.validate();
  std::vector<TargetKind> kinds(universe.size());
  const std::uint64_t y_end = params.m, z_end = 2 * params.m, one_end = 2 * params.m + params.kappa * params.n;
  for (auto& k : kinds) {
    std::uint64_t r = rng.below(params.N);
    k = r < y_end ? TargetKind::Y : r < z_end ? TargetKind::Z : r < one_end ? TargetKind::One : TargetKind::Zero;
  }
  return number_targets(universe, kinds, Distribution::D, rng.key());
}

Partition sample_d_prime(std::span<const Var> universe, std::uint64_t seed) {
  CounterRng rng(seed);
  return sample_d_prime(universe, rng);
}

Partition sample_d(const DParams& params, std::span<const Var> universe, std::uint64_t seed) {
  CounterRng rng(seed);
  return sample_d(params, universe, rng);
}

Formula apply_partition(const Formula& f, const Partition& phi) {
  FormulaBuilder b(f.field());
  std::vector<NodeId> mapped(f.size());
  for (NodeId i = 0; i < f.size(); ++i) {
    const Node& n = f.node(i);
    switch (n.op) {
      case Op::Variable: {
        const Target& t = phi.at(n.var);
        if (t.is_variable()) {
          mapped[i] = b.variable(t.as_var());
        } else {
          mapped[i] = b.constant(t.kind == TargetKind::One ? f.field().one() : f.field().zero());
        }
        break;
      }
      case Op::Constant: mapped[i] = b.constant(n.value); break;
      default: mapped[i] = b.gate(n.op, mapped[n.left], mapped[n.right]);
    }
  }
  return b.build(mapped.back());
}

PartitionStats partition_stats(const Partition& phi) {
  PartitionStats s;
  for (const Target& t : phi.targets()) {
    switch (t.kind) {
      case TargetKind::Y: ++s.count_y; break;
      case TargetKind::Z: ++s.count_z; break;
      case TargetKind::One: ++s.count_one; break;
      case TargetKind::Zero: ++s.count_zero; break;
    }
  }
  s.imbalance = s.count_y > s.count_z ? s.count_y - s.count_z : s.count_z - s.count_y;
  return s;
}

std::string partition_to_json(const Partition& phi) {
  // ordered_json keeps the map in universe order
  nlohmann::ordered_json j;
  j["seed"] = phi.seed();
  j["dist"] = to_string(phi.distribution());
  nlohmann::ordered_json map = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < phi.size(); ++i) map[to_string(phi.universe()[i])] = to_string(phi.targets()[i]);
  j["map"] = std::move(map);
  return j.dump();
}

Partition partition_from_json(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParamsError(std::string("partition JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("map") || !j["map"].is_object()) {
    throw InvalidParamsError("partition JSON needs a \"map\" object");
  }
  std::vector<Var> universe;
  std::vector<Target> targets;
  for (const auto& [k, v] : j["map"].items()) {
    if (!v.is_string()) throw InvalidParamsError("partition target for " + k + " must be a string");
    universe.push_back(parse_var(k));
    targets.push_back(parse_target(v.get<std::string>()));
  }
  std::uint64_t seed = j.value("seed", std::uint64_t{0});
  Distribution dist = parse_distribution(j.value("dist", std::string("Explicit")));
  return Partition(std::move(universe), std::move(targets), dist, seed);
}

std::vector<Var> x_vars(std::size_t n) {
  std::vector<Var> v;
  v.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) v.push_back(Var::x(static_cast<std::uint32_t>(i)));
  return v;
}

std::vector<Var> grid_vars(std::size_t n) {
  std::vector<Var> v;
  v.reserve(n * n);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) v.push_back(Var::grid(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)));
  }
  return v;
}

}  // namespace ropbench
