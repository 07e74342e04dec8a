#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace ropbench {

// X are input variables; Y and Z are the two sides a partition maps onto.
enum class Side : std::uint8_t { X = 0, Y = 1, Z = 2 };

// A variable name: x12, x3_4 (grid cell row 3, column 4), y5, z5.
// Indices are positive; col == 0 means the plain (non-grid) form.
struct Var {
  Side side = Side::X;
  std::uint32_t index = 0;
  std::uint32_t col = 0;

  static constexpr Var x(std::uint32_t i) { return {Side::X, i, 0}; }
  static constexpr Var grid(std::uint32_t i, std::uint32_t j) { return {Side::X, i, j}; }
  static constexpr Var y(std::uint32_t i) { return {Side::Y, i, 0}; }
  static constexpr Var z(std::uint32_t i) { return {Side::Z, i, 0}; }

  bool is_grid() const { return col != 0; }

  friend constexpr bool operator==(const Var&, const Var&) = default;
  friend constexpr auto operator<=>(const Var&, const Var&) = default;
};

std::string to_string(const Var& v);
// Throws InvalidParamsError on a malformed name.
Var parse_var(std::string_view text);

}  // namespace ropbench

template <>
struct std::hash<ropbench::Var> {
  std::size_t operator()(const ropbench::Var& v) const noexcept {
    std::uint64_t k = (static_cast<std::uint64_t>(v.side) << 62) ^ (static_cast<std::uint64_t>(v.index) << 31) ^ v.col;
    return std::hash<std::uint64_t>{}(k);
  }
};
