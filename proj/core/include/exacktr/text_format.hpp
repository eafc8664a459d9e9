#pragma once

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace exacktr::text_format {

// Shortest-exact decimal form of a double: parses back to the same bits.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double check = 0.0;
  std::sscanf(buf, "%lf", &check);
  if (check == v) {
    // Try shorter forms for readability where they stay exact.
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      std::sscanf(shorter, "%lf", &check);
      if (check == v) return shorter;
    }
  }
  return buf;
}

inline double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("bad value for " + what + ": '" + s + "'");
  }
  return v;
}

inline long long parse_ll(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("bad integer for " + what + ": '" + s + "'");
  }
  return v;
}

inline int parse_int(const std::string& s, const std::string& what) {
  return static_cast<int>(parse_ll(s, what));
}

inline bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw std::invalid_argument("bad boolean for " + what + ": '" + s + "'");
}

}  // namespace exacktr::text_format
