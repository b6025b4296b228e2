#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace borps {

// Empirical quantile with linear interpolation (type-7).
inline double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) {
    throw std::domain_error("empirical quantile of empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("quantile probability outside [0,1]");
  }
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

}  // namespace borps
