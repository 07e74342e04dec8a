#include "ropbench/permanent.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ropbench/error.hpp"

namespace ropbench {

PartitionMatrix PartitionMatrix::from_partition(const Partition& phi, std::size_t n) {
  PartitionMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m.set(i, j, phi.at(Var::grid(static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(j + 1))));
    }
  }
  return m;
}

PartitionMatrix PartitionMatrix::parse(const std::vector<std::string>& rows) {
  const std::size_t n = rows.size();
  PartitionMatrix m(n);
  bool numbered = false, unnumbered = false;
  for (std::size_t i = 0; i < n; ++i) {
    std::istringstream in(rows[i]);
    std::string tok;
    std::size_t j = 0;
    while (in >> tok) {
      if (j >= n) throw InvalidParamsError("row " + std::to_string(i + 1) + " has more than " + std::to_string(n) + " cells");
      Target t;
      if (tok == "y") {
        t = Target::y(0);
        unnumbered = true;
      } else if (tok == "z") {
        t = Target::z(0);
        unnumbered = true;
      } else {
        t = parse_target(tok);
        numbered = numbered || t.is_variable();
      }
      m.set(i, j++, t);
    }
    if (j != n) throw InvalidParamsError("row " + std::to_string(i + 1) + " has " + std::to_string(j) + " cells, expected " + std::to_string(n));
  }
  if (unnumbered && numbered) throw InvalidParamsError("mix of numbered and unnumbered y/z cells");
  if (unnumbered) m.renumber();
  return m;
}

void PartitionMatrix::renumber() {
  std::uint32_t ny = 0, nz = 0;
  for (auto& t : cells_) {
    if (t.kind == TargetKind::Y) t.index = ++ny;
    if (t.kind == TargetKind::Z) t.index = ++nz;
  }
}

std::vector<std::uint8_t> PartitionMatrix::ones_pattern() const {
  std::vector<std::uint8_t> p(cells_.size());
  for (std::size_t k = 0; k < cells_.size(); ++k) p[k] = cells_[k].kind == TargetKind::One;
  return p;
}

std::string PartitionMatrix::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (j) s += ' ';
      s += ropbench::to_string(at(i, j));
    }
    s += '\n';
  }
  return s;
}

std::int64_t ryser_permanent(std::span<const std::int64_t> a, std::size_t n) {
  if (n == 0) return 1;
  if (n > 30) throw CapError("Ryser permanent limited to n <= 30");
  std::vector<std::int64_t> rowsum(n, 0);
  __int128 total = 0;
  std::uint64_t gray = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    // Flip the column given by the lowest set bit of k.
    std::size_t j = static_cast<std::size_t>(__builtin_ctzll(k));
    std::uint64_t bit = std::uint64_t{1} << j;
    gray ^= bit;
    std::int64_t sign = (gray & bit) ? 1 : -1;
    for (std::size_t i = 0; i < n; ++i) rowsum[i] += sign * a[i * n + j];
    __int128 prod = 1;
    for (std::size_t i = 0; i < n && prod != 0; ++i) prod *= rowsum[i];
    int parity = __builtin_popcountll(gray) & 1;
    total += parity == static_cast<int>(n & 1) ? prod : -prod;
  }
  return static_cast<std::int64_t>(total);
}

FieldElem ryser_permanent(const PrimeField& f, std::span<const FieldElem> a, std::size_t n) {
  if (n == 0) return f.one();
  if (n > 30) throw CapError("Ryser permanent limited to n <= 30");
  std::vector<FieldElem> rowsum(n, f.zero());
  FieldElem total = f.zero();
  std::uint64_t gray = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    std::size_t j = static_cast<std::size_t>(__builtin_ctzll(k));
    std::uint64_t bit = std::uint64_t{1} << j;
    gray ^= bit;
    bool added = gray & bit;
    for (std::size_t i = 0; i < n; ++i) {
      rowsum[i] = added ? f.add(rowsum[i], a[i * n + j]) : f.sub(rowsum[i], a[i * n + j]);
    }
    FieldElem prod = f.one();
    for (std::size_t i = 0; i < n && prod.value != 0; ++i) prod = f.mul(prod, rowsum[i]);
    int parity = __builtin_popcountll(gray) & 1;
    total = parity == static_cast<int>(n & 1) ? f.add(total, prod) : f.sub(total, prod);
  }
  return total;
}

std::int64_t naive_permanent(std::span<const std::int64_t> a, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t total = 0;
  do {
    std::int64_t prod = 1;
    for (std::size_t i = 0; i < n && prod != 0; ++i) prod *= a[i * n + perm[i]];
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

RankMatrix pd_matrix_of_perm(const PartitionMatrix& x, const PrimeField& f, const MatrixCaps& caps) {
  const std::size_t n = x.n();
  if (n > 10) throw CapError("pd_matrix_of_perm needs n <= 10");
  struct Cell {
    Var var;
    std::size_t row, col;
  };
  std::vector<Cell> ys, zs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Target& t = x.at(i, j);
      if (t.kind == TargetKind::Y) ys.push_back({t.as_var(), i, j});
      if (t.kind == TargetKind::Z) zs.push_back({t.as_var(), i, j});
    }
  }
  auto by_var = [](const Cell& a, const Cell& b) { return a.var < b.var; };
  std::sort(ys.begin(), ys.end(), by_var);
  std::sort(zs.begin(), zs.end(), by_var);
  for (std::size_t k = 1; k < ys.size(); ++k) {
    if (ys[k].var == ys[k - 1].var) throw InvalidParamsError("Y target repeated in partition matrix");
  }
  for (std::size_t k = 1; k < zs.size(); ++k) {
    if (zs[k].var == zs[k - 1].var) throw InvalidParamsError("Z target repeated in partition matrix");
  }
  if (ys.size() > caps.max_y || zs.size() > caps.max_z) {
    throw CapError("partition matrix has " + std::to_string(ys.size()) + " Y and " + std::to_string(zs.size()) +
                   " Z cells, above the cap");
  }
  std::vector<Var> yr, zr;
  for (auto& c : ys) yr.push_back(c.var);
  for (auto& c : zs) zr.push_back(c.var);
  RankMatrix m(f, yr, zr);

  const auto ones = x.ones_pattern();
  std::vector<std::int64_t> minor;
  for (std::size_t p = 0; p < m.rows(); ++p) {
    std::uint32_t used_rows = 0, used_cols = 0;
    bool ok = true;
    for (std::size_t k = 0; k < ys.size() && ok; ++k) {
      if (!(p >> k & 1)) continue;
      ok = !(used_rows >> ys[k].row & 1) && !(used_cols >> ys[k].col & 1);
      used_rows |= 1u << ys[k].row;
      used_cols |= 1u << ys[k].col;
    }
    if (!ok) continue;
    for (std::size_t q = 0; q < m.cols(); ++q) {
      std::uint32_t rows = used_rows, cols = used_cols;
      bool good = true;
      for (std::size_t k = 0; k < zs.size() && good; ++k) {
        if (!(q >> k & 1)) continue;
        good = !(rows >> zs[k].row & 1) && !(cols >> zs[k].col & 1);
        rows |= 1u << zs[k].row;
        cols |= 1u << zs[k].col;
      }
      if (!good) continue;
      std::vector<std::size_t> keep_r, keep_c;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(rows >> i & 1)) keep_r.push_back(i);
        if (!(cols >> i & 1)) keep_c.push_back(i);
      }
      const std::size_t k = keep_r.size();
      minor.assign(k * k, 0);
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) minor[a * k + b] = ones[keep_r[a] * n + keep_c[b]];
      }
      std::int64_t v = ryser_permanent(minor, k);
      if (v != 0) m.set(p, q, f.from_i64(v));
    }
  }
  return m;
}

}  // namespace ropbench
