#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

namespace sdmm {

/// Shortest decimal text that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string join_ints(const std::vector<std::int64_t>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace sdmm
