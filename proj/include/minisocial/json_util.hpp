#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "json.hpp"

namespace minisocial {

using json = nlohmann::ordered_json;

/// Round to 9 significant digits. nlohmann then prints the shortest
/// representation, so text output carries at most 9 digits and reloads to the
/// same double.
inline double round9(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace minisocial
