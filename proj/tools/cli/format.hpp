// Shortest round-trip number formatting shared by config and table output.
#pragma once

#include <charconv>
#include <string>

namespace esurf::cli {

inline std::string num(double v) {
  if (v == 0.0) return "0";  // no "-0" in outputs
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string num(long v) { return std::to_string(v); }
inline std::string num(int v) { return std::to_string(v); }

}  // namespace esurf::cli
