#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace swarmlink {

/// Shortest decimal form that parses back to the same double.
inline std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop negative zero
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) return "nan";
  std::string s(buf, end);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace swarmlink
