#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>

#include "medgrad/error.hpp"

namespace medgrad {

/// Shortest decimal that parses back to the same double; "nan" for NaN.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw InternalError("to_chars failed");
  return std::string(buf, end);
}

inline double parse_double(std::string_view tok) {
  if (tok == "nan" || tok == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ValidationError("malformed number '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace medgrad
