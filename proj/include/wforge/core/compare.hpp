#pragma once

#include <charconv>
#include <optional>
#include <string>

#include "wforge/core/model.hpp"

namespace wforge {

inline std::optional<long long> as_integer(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

// Integers compare numerically when both sides parse, everything else
// lexicographically.
inline bool compare_values(const std::string& lhs, CompareOp op, const std::string& rhs) {
  int c = 0;
  auto a = as_integer(lhs), b = as_integer(rhs);
  if (a && b) c = *a < *b ? -1 : (*a > *b ? 1 : 0);
  else c = lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  switch (op) {
    case CompareOp::Less: return c < 0;
    case CompareOp::LessEq: return c <= 0;
    case CompareOp::Greater: return c > 0;
    case CompareOp::GreaterEq: return c >= 0;
    case CompareOp::Equal: return c == 0;
    case CompareOp::NotEqual: return c != 0;
  }
  return false;
}

}  // namespace wforge
