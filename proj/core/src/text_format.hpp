#pragma once

#include <charconv>
#include <string>

namespace hoimtrack {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace hoimtrack
