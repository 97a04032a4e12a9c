// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

namespace ppcloud {

/// exp(-2 t^2 / (t + mean)): the tail estimate P(|X - E X| > t) used for
/// Poisson box counts.
inline double chernoff_bound(double mean, double t) { return std::exp(-2.0 * t * t / (t + mean)); }

/// chernoff_bound with t = kappa * mean, i.e. exp(-2 kappa^2 mean / (1 + kappa)).
inline double bad_box_bound(double mean, double kappa) { return chernoff_bound(mean, kappa * mean); }

/// Two-sided Cramer-Chernoff bound from the Poisson rate function,
/// exp(-mean h(1+kappa)) + exp(-mean h(1-kappa)), h(x) = x log x - x + 1.
/// Reported next to bad_box_bound as a reference that always holds.
inline double poisson_rate_bound(double mean, double kappa) {
  auto h = [](double x) { return x > 0.0 ? x * std::log(x) - x + 1.0 : 1.0; };
  return std::exp(-mean * h(1.0 + kappa)) + std::exp(-mean * h(1.0 - kappa));
}

/// Exponent rho(kappa) = (beta/2)^d d gamma 2 kappa^2 / (1 + kappa) of the
/// bad-box decay in the small-beta regime.
inline double rho_kappa(double beta, int d, double gamma, double kappa) {
  return std::pow(beta / 2.0, d) * d * gamma * 2.0 * kappa * kappa / (1.0 + kappa);
}

/// Threshold gamma^(-1/d) separating the vanishing and decaying regimes.
inline double beta_threshold(double gamma, int d) { return std::pow(gamma, -1.0 / d); }

/// Site-percolation thresholds used only to label measured bad probabilities
/// as sub- or super-critical.
inline double site_percolation_threshold(int d) {
  switch (d) {
    case 1: return 1.0;
    case 2: return 0.592746;
    case 3: return 0.3116077;
    default: throw std::invalid_argument("site_percolation_threshold: d must be 1..3");
  }
}

}  // namespace ppcloud
