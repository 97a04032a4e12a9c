// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ppcloud/geometry.hpp"
#include "ppcloud/random.hpp"

namespace ppcloud {

/// Parameters of a homogeneous Poisson process of intensity gamma * epsilon^-dim.
struct ProcessParams {
  double gamma = 1.0;
  double epsilon = 1.0;
  int dim = 2;
  std::uint64_t seed = 0;

  double intensity() const { return gamma * std::pow(epsilon, -dim); }

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw std::invalid_argument("epsilon must be > 0");
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dim must be 1, 2 or 3");
    if (!std::isfinite(intensity())) throw std::invalid_argument("intensity is not representable");
  }
};

template <int D>
class PointCloud {
 public:
  PointCloud() = default;

  /// Validates containment (half-open) and pairwise distinctness.
  PointCloud(std::vector<Point<D>> points, ProcessParams params, Region<D> region)
      : points_(std::move(points)), params_(params), region_(region) {
    check_dim<D>();
    region_.validate();
    for (const auto& x : points_)
      if (!region_.contains(x)) throw std::invalid_argument("PointCloud: point outside region");
    if (has_duplicates(points_)) throw std::invalid_argument("PointCloud: duplicate points");
  }

  const std::vector<Point<D>>& points() const { return points_; }
  const ProcessParams& params() const { return params_; }
  const Region<D>& region() const { return region_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point<D>& operator[](std::size_t i) const { return points_[i]; }

  static bool has_duplicates(const std::vector<Point<D>>& pts) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
      if (pts[order[i]] == pts[order[i - 1]]) return true;
    return false;
  }

 private:
  std::vector<Point<D>> points_;
  ProcessParams params_;
  Region<D> region_;
};

struct SampleOptions {
  double max_expected_points = 1e8;
};

/// Expected number of points gamma * epsilon^-d * |region|.
template <int D>
double expected_count(const ProcessParams& params, const Region<D>& region) {
  return params.intensity() * region.volume();
}

/// Draw a realization: N ~ Poisson(lambda |region|), then N i.i.d. uniform points.
/// Fully determined by (params, region).
template <int D>
PointCloud<D> sample(const ProcessParams& params, const Region<D>& region,
                     const SampleOptions& opts = {}) {
  check_dim<D>();
  params.validate();
  region.validate();
  if (params.dim != D) throw std::invalid_argument("sample: params.dim does not match D");
  const double lambda = expected_count<D>(params, region);
  if (!(lambda <= opts.max_expected_points))
    throw std::length_error("sample: expected point count exceeds the configured cap");

  Rng rng(params.seed);
  const auto n = static_cast<std::size_t>(sample_poisson(rng, lambda));
  std::vector<Point<D>> pts(n);
  auto draw = [&](Point<D>& x) {
    do {
      for (int i = 0; i < D; ++i) x[i] = region.lo[i] + region.side(i) * rng.uniform();
    } while (!region.contains(x));  // rounding can land exactly on hi
  };
  for (auto& x : pts) draw(x);

  // Duplicates have probability ~2^-53 per pair; redraw until simple.
  for (;;) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pts[a] < pts[b] || (pts[a] == pts[b] && a < b);
    });
    bool redrew = false;
    for (std::size_t i = 1; i < n; ++i) {
      if (pts[order[i]] == pts[order[i - 1]]) {
        draw(pts[order[i]]);
        redrew = true;
      }
    }
    if (!redrew) break;
  }
  return PointCloud<D>(std::move(pts), params, region);
}

/// Number of cloud points in `sub` (half-open membership).
template <int D>
std::size_t count_in(const PointCloud<D>& cloud, const Region<D>& sub) {
  return static_cast<std::size_t>(std::count_if(
      cloud.points().begin(), cloud.points().end(), [&](const Point<D>& x) { return sub.contains(x); }));
}

/// The sub-cloud of points in `sub`; `sub` must lie inside the cloud's region.
template <int D>
PointCloud<D> restrict(const PointCloud<D>& cloud, const Region<D>& sub) {
  sub.validate();
  if (!cloud.region().contains(sub))
    throw std::invalid_argument("restrict: sub-region not contained in cloud region");
  std::vector<Point<D>> kept;
  for (const auto& x : cloud.points())
    if (sub.contains(x)) kept.push_back(x);
  return PointCloud<D>(std::move(kept), cloud.params(), sub);
}

}  // namespace ppcloud
