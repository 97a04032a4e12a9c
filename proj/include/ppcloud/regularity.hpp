// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "ppcloud/energy.hpp"
#include "ppcloud/lattice.hpp"
#include "ppcloud/parallel.hpp"
#include "ppcloud/point_process.hpp"
#include "ppcloud/raster.hpp"

namespace ppcloud {

/// Nearest-seed labelling of a raster, i.e. a pixelated Voronoi diagram.
///
/// clearance[c] is the radius of the largest ball around the cell centre y
/// that stays in the Voronoi cell of label(y) clipped to the raster region:
/// min over seeds z != x of (|y-z|^2 - |y-x|^2) / (2|x-z|), and the distance
/// from y to the region boundary.
template <int D>
struct VoronoiRaster {
  RasterGrid<D> grid;
  std::vector<std::uint32_t> labels;
  std::vector<double> clearance;
};

namespace detail {

/// Nearest seed (ties -> lowest index) and clearance for one probe point.
template <int D>
std::pair<std::uint32_t, double> nearest_with_clearance(const std::vector<Point<D>>& pts,
                                                        const CellIndex<D>& index, const Point<D>& y,
                                                        double boundary_distance, double r0) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cand;
  double radius = r0;
  for (;;) {
    cand.clear();
    index.for_each_in_ball(y, radius, [&](std::size_t p) { cand.push_back(p); });
    if (cand.empty()) {
      radius *= 2.0;
      continue;
    }
    std::size_t best = cand.front();
    double bd = dist2<D>(pts[best], y);
    for (std::size_t p : cand) {
      const double d2 = dist2<D>(pts[p], y);
      if (d2 < bd || (d2 == bd && p < best)) {
        best = p;
        bd = d2;
      }
    }
    double clear = boundary_distance;
    for (std::size_t z : cand) {
      if (z == best) continue;
      const double xz = dist<D>(pts[best], pts[z]);
      clear = std::min(clear, (dist2<D>(pts[z], y) - bd) / (2.0 * xz));
    }
    // Any seed farther than |y-x| + 2*clear cannot lower the clearance.
    const double need = std::sqrt(bd) + 2.0 * clear;
    if (need <= radius || clear == inf) return {static_cast<std::uint32_t>(best), clear};
    radius = std::max(2.0 * radius, need);
  }
}

}  // namespace detail

/// Rasterize the Voronoi diagram of `cloud` over `region` at pitch <= h.
/// Requires h <= epsilon / 8.
template <int D>
VoronoiRaster<D> rasterize(const PointCloud<D>& cloud, const Region<D>& region, double h,
                           unsigned threads = 1) {
  if (cloud.empty()) throw std::invalid_argument("rasterize: empty cloud");
  if (!(h > 0.0)) throw std::invalid_argument("rasterize: pitch must be > 0");
  if (h > cloud.params().epsilon / 8.0 * (1.0 + 1e-12))
    throw std::invalid_argument("rasterize: pitch must not exceed epsilon/8");
  if (cloud.size() > std::numeric_limits<std::uint32_t>::max())
    throw std::length_error("rasterize: too many points for 32-bit labels");

  VoronoiRaster<D> vr;
  vr.grid = RasterGrid<D>(region, h);
  vr.labels.assign(vr.grid.size(), 0);
  vr.clearance.assign(vr.grid.size(), 0.0);

  // Typical spacing; search starts at a few spacings.
  const Region<D> bounds = cloud.region();
  const double spacing = std::pow(bounds.volume() / static_cast<double>(cloud.size()), 1.0 / D);
  const double r0 = 2.5 * spacing;
  const CellIndex<D> index(cloud.points(), bounds, r0);

  parallel_for(vr.grid.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const Point<D> y = vr.grid.center(c);
      const auto [label, clear] =
          detail::nearest_with_clearance<D>(cloud.points(), index, y, region.distance_to_boundary(y), r0);
      vr.labels[c] = label;
      vr.clearance[c] = clear;
    }
  });
  return vr;
}

struct RegularityReport {
  double alpha = 0.0;
  double epsilon = 0.0;
  std::vector<char> regular;          ///< by point index
  std::vector<double> inradius_est;   ///< largest clearance over the point's cells
  std::vector<double> diam_est;       ///< diagonal of the bounding box of the point's cells
  std::vector<char> touches_border;   ///< some cell of the point lies on the raster border
  std::vector<std::size_t> cell_count;

  std::size_t regular_count() const {
    return static_cast<std::size_t>(std::count(regular.begin(), regular.end(), 1));
  }
};

/// Points whose (rastered, clipped) Voronoi cell has inradius > alpha*eps and
/// diameter < eps/alpha.
template <int D>
RegularityReport regular_subcloud(const VoronoiRaster<D>& raster, const PointCloud<D>& cloud, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("regular_subcloud: alpha must be > 0");
  if (raster.labels.size() != raster.grid.size()) throw std::invalid_argument("regular_subcloud: bad raster");
  const std::size_t n = cloud.size();
  RegularityReport r;
  r.alpha = alpha;
  r.epsilon = cloud.params().epsilon;
  r.inradius_est.assign(n, 0.0);
  r.diam_est.assign(n, 0.0);
  r.touches_border.assign(n, 0);
  r.cell_count.assign(n, 0);
  r.regular.assign(n, 0);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Point<D>> bb_lo(n), bb_hi(n);
  for (auto& p : bb_lo) p.fill(inf);
  for (auto& p : bb_hi) p.fill(-inf);
  for (std::size_t c = 0; c < raster.grid.size(); ++c) {
    const std::uint32_t x = raster.labels[c];
    if (x >= n) throw std::invalid_argument("regular_subcloud: raster label out of range");
    ++r.cell_count[x];
    r.inradius_est[x] = std::max(r.inradius_est[x], raster.clearance[c]);
    const auto y = raster.grid.center(c);
    for (int i = 0; i < D; ++i) {
      bb_lo[x][i] = std::min(bb_lo[x][i], y[i] - 0.5 * raster.grid.pitch(i));
      bb_hi[x][i] = std::max(bb_hi[x][i], y[i] + 0.5 * raster.grid.pitch(i));
    }
    if (raster.grid.on_border(c)) r.touches_border[x] = 1;
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (r.cell_count[x] == 0) continue;
    double d2 = 0.0;
    for (int i = 0; i < D; ++i) d2 += (bb_hi[x][i] - bb_lo[x][i]) * (bb_hi[x][i] - bb_lo[x][i]);
    r.diam_est[x] = std::sqrt(d2);
    r.regular[x] = (r.inradius_est[x] > alpha * r.epsilon && r.diam_est[x] < r.epsilon / alpha) ? 1 : 0;
  }
  return r;
}

/// Raster mask of V(eta^alpha) ∩ region: cells whose label is regular and
/// lies in `region`, with the cell centre in `region`.
template <int D>
RasterMask<D> regular_region_mask(const VoronoiRaster<D>& raster, const PointCloud<D>& cloud,
                                  const RegularityReport& report, const Region<D>& region) {
  RasterMask<D> m{raster.grid, std::vector<char>(raster.grid.size(), 0)};
  for (std::size_t c = 0; c < raster.grid.size(); ++c) {
    const auto x = raster.labels[c];
    m.included[c] = report.regular[x] && region.contains(cloud[x]) && region.contains(raster.grid.center(c));
  }
  return m;
}

/// Raster approximation of (int_{V(eta^alpha) ∩ region} |u_hat - u|^q dx)^(1/q)
/// where u_hat is the Voronoi step extension of the cloud field.
template <int D>
double convergence_distance(const CloudField<D>& u, const std::type_identity_t<std::function<double(const Point<D>&)>>& target,
                            const VoronoiRaster<D>& raster, const RegularityReport& report,
                            const Region<D>& region, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("convergence_distance: q must be >= 1");
  const auto& cloud = u.cloud();
  if (report.regular.size() != cloud.size())
    throw std::invalid_argument("convergence_distance: report does not match cloud");
  double acc = 0.0;
  for (std::size_t c = 0; c < raster.grid.size(); ++c) {
    const auto x = raster.labels[c];
    if (!report.regular[x] || !region.contains(cloud[x])) continue;
    const auto y = raster.grid.center(c);
    if (!region.contains(y)) continue;
    acc += abs_pow(u[x] - target(y), q);
  }
  return std::pow(acc * raster.grid.cell_volume(), 1.0 / q);
}

}  // namespace ppcloud
