// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

namespace ppcloud {

struct MannKendall {
  double s = 0.0;
  double variance = 0.0;
  double z = 0.0;
  double p_upward = 1.0;  ///< one-sided p-value for an increasing trend
  bool upward_significant = false;
};

/// Mann-Kendall trend test with the tie-corrected variance and continuity
/// correction; `level` is the one-sided significance level.
inline MannKendall mann_kendall(const std::vector<double>& x, double level = 0.05) {
  MannKendall r;
  const std::size_t n = x.size();
  if (n < 2) return r;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) r.s += (x[j] > x[i]) - (x[j] < x[i]);
  std::map<double, std::size_t> ties;
  for (double v : x) ++ties[v];
  const double nn = static_cast<double>(n);
  r.variance = nn * (nn - 1) * (2 * nn + 5);
  for (const auto& [v, t] : ties) {
    const double tt = static_cast<double>(t);
    r.variance -= tt * (tt - 1) * (2 * tt + 5);
  }
  r.variance /= 18.0;
  if (r.variance > 0.0) {
    if (r.s > 0) r.z = (r.s - 1) / std::sqrt(r.variance);
    else if (r.s < 0) r.z = (r.s + 1) / std::sqrt(r.variance);
  }
  r.p_upward = 0.5 * std::erfc(r.z / std::sqrt(2.0));
  r.upward_significant = r.p_upward < level;
  return r;
}

/// Number of adjacent steps where the sequence moves against the expected
/// direction (a drop for nondecreasing, a rise for nonincreasing).
inline std::size_t count_inversions(const std::vector<double>& x, bool nondecreasing) {
  std::size_t k = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (nondecreasing ? x[i + 1] < x[i] : x[i + 1] > x[i]) ++k;
  return k;
}

inline double median(std::vector<double> x) {
  if (x.empty()) return std::nan("");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

inline double mean(const std::vector<double>& x) {
  if (x.empty()) return std::nan("");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace ppcloud
