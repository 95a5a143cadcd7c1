#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace nvmix {

/// Shortest decimal string that parses back to exactly `v` ("nan", "inf", "-inf" otherwise).
inline std::string shortest_repr(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace nvmix
