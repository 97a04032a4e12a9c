// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppcloud {

inline constexpr int kMaxDim = 3;

template <int D>
using Point = std::array<double, D>;

template <int D>
constexpr void check_dim() {
  static_assert(D >= 1 && D <= kMaxDim, "supported dimensions are 1, 2 and 3");
}

template <int D>
double dist2(const Point<D>& a, const Point<D>& b) {
  double r = 0.0;
  for (int i = 0; i < D; ++i) {
    const double t = a[i] - b[i];
    r += t * t;
  }
  return r;
}

template <int D>
double dist(const Point<D>& a, const Point<D>& b) {
  return std::sqrt(dist2<D>(a, b));
}

/// Axis-aligned box [lo, hi). All membership tests in the library are
/// half-open per coordinate so that tilings assign each point to one cell.
template <int D>
struct Region {
  Point<D> lo{};
  Point<D> hi{};

  Region() = default;
  Region(const Point<D>& lo_, const Point<D>& hi_) : lo(lo_), hi(hi_) { validate(); }

  void validate() const {
    for (int i = 0; i < D; ++i) {
      if (!(std::isfinite(lo[i]) && std::isfinite(hi[i])) || !(lo[i] < hi[i]))
        throw std::invalid_argument("Region: need lo[i] < hi[i] on every axis (axis " +
                                    std::to_string(i) + ")");
    }
  }

  double side(int i) const { return hi[i] - lo[i]; }

  double min_side() const {
    double m = side(0);
    for (int i = 1; i < D; ++i) m = std::min(m, side(i));
    return m;
  }

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < D; ++i) v *= side(i);
    return v;
  }

  bool contains(const Point<D>& x) const {
    for (int i = 0; i < D; ++i)
      if (!(lo[i] <= x[i] && x[i] < hi[i])) return false;
    return true;
  }

  /// True when `other` lies inside this region (closed comparison on bounds).
  bool contains(const Region& other) const {
    for (int i = 0; i < D; ++i)
      if (other.lo[i] < lo[i] || other.hi[i] > hi[i]) return false;
    return true;
  }

  bool intersects(const Region& other) const {
    for (int i = 0; i < D; ++i)
      if (!(other.lo[i] < hi[i] && lo[i] < other.hi[i])) return false;
    return true;
  }

  /// Volume of the intersection with `other` (0 when disjoint).
  double overlap_volume(const Region& other) const {
    double v = 1.0;
    for (int i = 0; i < D; ++i) {
      const double a = std::max(lo[i], other.lo[i]);
      const double b = std::min(hi[i], other.hi[i]);
      if (b <= a) return 0.0;
      v *= b - a;
    }
    return v;
  }

  Region dilated(double margin) const {
    Region r = *this;
    for (int i = 0; i < D; ++i) {
      r.lo[i] -= margin;
      r.hi[i] += margin;
    }
    r.validate();
    return r;
  }

  /// Euclidean distance from an interior point to the region boundary.
  double distance_to_boundary(const Point<D>& x) const {
    double m = std::abs(x[0] - lo[0]);
    for (int i = 0; i < D; ++i) {
      m = std::min(m, std::abs(x[i] - lo[i]));
      m = std::min(m, std::abs(hi[i] - x[i]));
    }
    return m;
  }

  friend bool operator==(const Region&, const Region&) = default;
};

/// The unit cube centred at the origin, [-1/2, 1/2)^D.
template <int D>
Region<D> unit_cube() {
  Point<D> lo, hi;
  lo.fill(-0.5);
  hi.fill(0.5);
  return Region<D>(lo, hi);
}

}  // namespace ppcloud
