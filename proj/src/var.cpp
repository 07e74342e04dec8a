#include "ropbench/var.hpp"

#include <charconv>

#include "ropbench/error.hpp"

namespace ropbench {

std::string to_string(const Var& v) {
  char prefix = v.side == Side::X ? 'x' : v.side == Side::Y ? 'y' : 'z';
  std::string s(1, prefix);
  s += std::to_string(v.index);
  if (v.col != 0) {
    s += '_';
    s += std::to_string(v.col);
  }
  return s;
}

namespace {

bool parse_positive(std::string_view digits, std::uint32_t& out) {
  if (digits.empty()) return false;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
  return ec == std::errc() && ptr == digits.data() + digits.size() && out > 0;
}

}  // namespace

Var parse_var(std::string_view text) {
  if (text.size() < 2) throw InvalidParamsError("bad variable name '" + std::string(text) + "'");
  Var v;
  switch (text[0]) {
    case 'x': v.side = Side::X; break;
    case 'y': v.side = Side::Y; break;
    case 'z': v.side = Side::Z; break;
    default: throw InvalidParamsError("bad variable name '" + std::string(text) + "'");
  }
  std::string_view rest = text.substr(1);
  auto us = rest.find('_');
  bool ok = true;
  if (us == std::string_view::npos) {
    ok = parse_positive(rest, v.index);
  } else {
    // Only input variables have the grid form.
    ok = v.side == Side::X && parse_positive(rest.substr(0, us), v.index) && parse_positive(rest.substr(us + 1), v.col);
  }
  if (!ok) throw InvalidParamsError("bad variable name '" + std::string(text) + "'");
  return v;
}

}  // namespace ropbench
