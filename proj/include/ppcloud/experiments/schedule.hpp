// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

namespace ppcloud {

/// sigma(eps) = eps (log eps^-d)^(1/d).
inline double sigma_scale(double epsilon, int d) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("sigma_scale: need 0 < epsilon < 1");
  return epsilon * std::pow(d * std::log(1.0 / epsilon), 1.0 / d);
}

/// Interaction scale s(eps) = beta * sigma(eps) and its refinement
/// s'(eps) = s(eps) / coarse_divisor (default 4 sqrt(d)).
struct ScaleSchedule {
  double beta = 1.0;
  int d = 2;
  double coarse_divisor = 0.0;  ///< 0 selects 4 sqrt(d)

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("ScaleSchedule: beta must be > 0");
    if (d < 1 || d > 3) throw std::invalid_argument("ScaleSchedule: d must be 1..3");
    if (coarse_divisor < 0.0) throw std::invalid_argument("ScaleSchedule: coarse_divisor must be >= 0");
  }
  double divisor() const { return coarse_divisor > 0.0 ? coarse_divisor : 4.0 * std::sqrt(static_cast<double>(d)); }
  double s(double epsilon) const { return beta * sigma_scale(epsilon, d); }
  double s_refined(double epsilon) const { return s(epsilon) / divisor(); }
  double beta_refined() const { return beta / divisor(); }
};

}  // namespace ppcloud
