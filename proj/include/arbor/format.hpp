#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace arbor {

// Shortest decimal that round-trips to the same double. Negative zero prints
// as "0" so that outputs do not depend on the sign of an exact zero.
inline std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf, end);
}

}  // namespace arbor
