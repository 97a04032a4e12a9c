// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "ppcloud/geometry.hpp"

namespace ppcloud {

/// Integer lattice coordinates of a box; the centre is s * coords.
template <int D>
struct BoxId {
  std::array<std::int64_t, D> coords{};

  friend bool operator==(const BoxId&, const BoxId&) = default;
  friend auto operator<=>(const BoxId&, const BoxId&) = default;
};

enum class Adjacency {
  face,      ///< |J - J'| = s
  diagonal,  ///< every coordinate offset in {-s, 0, s}, J' != J
};

/// The boxes Q_s(J), J in sZ^d, whose centres lie in a region (half-open).
/// The lattice is anchored at the origin; boxes are half-open
/// [s k - s/2, s k + s/2) per axis and enumerated lexicographically
/// (first axis most significant), which is also the linear index order.
template <int D>
class LatticePartition {
 public:
  LatticePartition() = default;

  LatticePartition(const Region<D>& region, double s) : region_(region), s_(s) {
    check_dim<D>();
    region.validate();
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("partition: s must be > 0");
    if (s > region.min_side()) throw std::invalid_argument("partition: s exceeds region side");
    std::size_t total = 1;
    for (int i = 0; i < D; ++i) {
      std::int64_t kmin = static_cast<std::int64_t>(std::ceil(region.lo[i] / s));
      while (static_cast<double>(kmin - 1) * s >= region.lo[i]) --kmin;
      while (static_cast<double>(kmin) * s < region.lo[i]) ++kmin;
      std::int64_t kmax = static_cast<std::int64_t>(std::floor(region.hi[i] / s));
      while (static_cast<double>(kmax) * s >= region.hi[i]) --kmax;
      while (static_cast<double>(kmax + 1) * s < region.hi[i]) ++kmax;
      kmin_[i] = kmin;
      extent_[i] = kmax >= kmin ? kmax - kmin + 1 : 0;
      total *= static_cast<std::size_t>(extent_[i]);
    }
    size_ = total;
    std::size_t stride = 1;
    for (int i = D - 1; i >= 0; --i) {
      stride_[i] = stride;
      stride *= static_cast<std::size_t>(extent_[i]);
    }
  }

  const Region<D>& region() const { return region_; }
  double s() const { return s_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::int64_t kmin(int axis) const { return kmin_[axis]; }
  std::int64_t extent(int axis) const { return extent_[axis]; }
  double box_volume() const { return std::pow(s_, D); }

  BoxId<D> box(std::size_t idx) const {
    BoxId<D> id;
    for (int i = 0; i < D; ++i) {
      id.coords[i] = kmin_[i] + static_cast<std::int64_t>(idx / stride_[i]);
      idx %= stride_[i];
    }
    return id;
  }

  std::optional<std::size_t> index_of(const BoxId<D>& id) const {
    std::size_t idx = 0;
    for (int i = 0; i < D; ++i) {
      const std::int64_t k = id.coords[i] - kmin_[i];
      if (k < 0 || k >= extent_[i]) return std::nullopt;
      idx += static_cast<std::size_t>(k) * stride_[i];
    }
    return idx;
  }

  bool contains(const BoxId<D>& id) const { return index_of(id).has_value(); }

  Point<D> center(std::size_t idx) const {
    const auto id = box(idx);
    Point<D> c;
    for (int i = 0; i < D; ++i) c[i] = static_cast<double>(id.coords[i]) * s_;
    return c;
  }

  static double lower_face(std::int64_t k, double s) { return static_cast<double>(k) * s - 0.5 * s; }
  static double upper_face(std::int64_t k, double s) { return static_cast<double>(k) * s + 0.5 * s; }

  /// Q_s(J) as a half-open region.
  Region<D> box_region(std::size_t idx) const {
    const auto id = box(idx);
    Point<D> lo, hi;
    for (int i = 0; i < D; ++i) {
      lo[i] = lower_face(id.coords[i], s_);
      hi[i] = upper_face(id.coords[i], s_);
    }
    return Region<D>(lo, hi);
  }

  /// Bounding box of the union of all boxes.
  Region<D> covered_region() const {
    Point<D> lo, hi;
    for (int i = 0; i < D; ++i) {
      lo[i] = lower_face(kmin_[i], s_);
      hi[i] = upper_face(kmin_[i] + extent_[i] - 1, s_);
    }
    return Region<D>(lo, hi);
  }

  /// Lattice coordinate along one axis of the box containing coordinate x.
  std::int64_t axis_coord(double x) const {
    auto k = static_cast<std::int64_t>(std::floor(x / s_ + 0.5));
    while (lower_face(k, s_) > x) --k;
    while (upper_face(k, s_) <= x) ++k;
    return k;
  }

  /// Linear index of the box containing x, if any.
  std::optional<std::size_t> locate(const Point<D>& x) const {
    BoxId<D> id;
    for (int i = 0; i < D; ++i) id.coords[i] = axis_coord(x[i]);
    return index_of(id);
  }

  /// Neighbour indices in ascending order, clipped to the partition.
  std::vector<std::size_t> neighbors(std::size_t idx, Adjacency mode) const {
    std::vector<std::size_t> out;
    const auto id = box(idx);
    if (mode == Adjacency::face) {
      out.reserve(2 * D);
      for (int i = 0; i < D; ++i) {
        for (int sgn : {-1, 1}) {
          auto nb = id;
          nb.coords[i] += sgn;
          if (auto j = index_of(nb)) out.push_back(*j);
        }
      }
    } else {
      std::array<int, D> off;
      off.fill(-1);
      for (;;) {
        bool zero = true;
        auto nb = id;
        for (int i = 0; i < D; ++i) {
          nb.coords[i] += off[i];
          zero = zero && off[i] == 0;
        }
        if (!zero)
          if (auto j = index_of(nb)) out.push_back(*j);
        int i = D - 1;
        while (i >= 0 && off[i] == 1) off[i--] = -1;
        if (i < 0) break;
        ++off[i];
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  Region<D> region_;
  double s_ = 0.0;
  std::array<std::int64_t, D> kmin_{};
  std::array<std::int64_t, D> extent_{};
  std::array<std::size_t, D> stride_{};
  std::size_t size_ = 0;
};

template <int D>
LatticePartition<D> build_partition(const Region<D>& region, double s) {
  return LatticePartition<D>(region, s);
}

template <int D>
std::optional<BoxId<D>> box_of(const LatticePartition<D>& partition, const std::type_identity_t<Point<D>>& x) {
  if (auto idx = partition.locate(x)) return partition.box(*idx);
  return std::nullopt;
}

template <int D>
std::vector<BoxId<D>> neighbor_boxes(const BoxId<D>& id, const LatticePartition<D>& partition,
                                     Adjacency mode) {
  const auto idx = partition.index_of(id);
  if (!idx) throw std::invalid_argument("neighbors: box not in partition");
  std::vector<BoxId<D>> out;
  for (std::size_t j : partition.neighbors(*idx, mode)) out.push_back(partition.box(j));
  return out;
}

template <int D>
std::vector<BoxId<D>> face_neighbors(const BoxId<D>& id, const LatticePartition<D>& partition) {
  return neighbor_boxes(id, partition, Adjacency::face);
}

template <int D>
std::vector<BoxId<D>> diagonal_neighbors(const BoxId<D>& id, const LatticePartition<D>& partition) {
  return neighbor_boxes(id, partition, Adjacency::diagonal);
}

/// Cell list over a fixed point set for fixed-radius ball queries.
template <int D>
class CellIndex {
 public:
  CellIndex(const std::vector<Point<D>>& points, const Region<D>& bounds, double cell_side)
      : points_(&points), lo_(bounds.lo), side_(cell_side) {
    if (!(cell_side > 0.0)) throw std::invalid_argument("CellIndex: cell side must be > 0");
    std::size_t ncell = 1;
    for (int i = 0; i < D; ++i) {
      dims_[i] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(bounds.side(i) / side_)));
      ncell *= static_cast<std::size_t>(dims_[i]);
    }
    std::vector<std::size_t> cell_of(points.size());
    start_.assign(ncell + 1, 0);
    for (std::size_t p = 0; p < points.size(); ++p) {
      cell_of[p] = linear(cell_coords(points[p]));
      ++start_[cell_of[p] + 1];
    }
    for (std::size_t c = 0; c < ncell; ++c) start_[c + 1] += start_[c];
    ids_.resize(points.size());
    auto fill = start_;
    for (std::size_t p = 0; p < points.size(); ++p) ids_[fill[cell_of[p]]++] = p;
  }

  double cell_side() const { return side_; }
  std::size_t cell_count() const { return start_.size() - 1; }

  /// Calls f(index) for every point with |y - x| <= r. Any radius is allowed;
  /// cells are visited lexicographically, ascending index within a cell.
  template <class F>
  void for_each_in_ball(const Point<D>& x, double r, F&& f) const {
    std::array<std::int64_t, D> a, b;
    for (int i = 0; i < D; ++i) {
      a[i] = std::max<std::int64_t>(0, axis_cell(x[i] - r, i));
      b[i] = std::min<std::int64_t>(dims_[i] - 1, axis_cell(x[i] + r, i));
      if (a[i] > b[i]) return;
    }
    const double r2 = r * r;
    std::array<std::int64_t, D> c = a;
    for (;;) {
      const std::size_t cell = linear(c);
      for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) {
        const std::size_t p = ids_[k];
        if (dist2<D>((*points_)[p], x) <= r2) f(p);
      }
      int i = D - 1;
      while (i >= 0 && c[i] == b[i]) {
        c[i] = a[i];
        --i;
      }
      if (i < 0) break;
      ++c[i];
    }
  }

  /// Indices of points in the closed ball B_r(x), ascending. Requires r <= cell side.
  std::vector<std::size_t> neighbors_within(const Point<D>& x, double r) const {
    if (r > side_) throw std::invalid_argument("neighbors_within: radius exceeds cell side");
    std::vector<std::size_t> out;
    for_each_in_ball(x, r, [&](std::size_t p) { out.push_back(p); });
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::int64_t axis_cell(double x, int i) const {
    const double t = std::floor((x - lo_[i]) / side_);
    if (t < -1.0) return -1;
    if (t > static_cast<double>(dims_[i])) return dims_[i];
    return static_cast<std::int64_t>(t);
  }

  std::array<std::int64_t, D> cell_coords(const Point<D>& x) const {
    std::array<std::int64_t, D> c;
    for (int i = 0; i < D; ++i) c[i] = std::clamp<std::int64_t>(axis_cell(x[i], i), 0, dims_[i] - 1);
    return c;
  }

  std::size_t linear(const std::array<std::int64_t, D>& c) const {
    std::size_t idx = 0;
    for (int i = 0; i < D; ++i) idx = idx * static_cast<std::size_t>(dims_[i]) + static_cast<std::size_t>(c[i]);
    return idx;
  }

  const std::vector<Point<D>>* points_;
  Point<D> lo_;
  double side_;
  std::array<std::int64_t, D> dims_{};
  std::vector<std::size_t> start_;
  std::vector<std::size_t> ids_;
};

}  // namespace ppcloud
