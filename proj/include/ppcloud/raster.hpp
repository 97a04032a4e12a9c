// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ppcloud/geometry.hpp"

namespace ppcloud {

/// Regular grid of cells tiling a region exactly. The requested pitch is an
/// upper bound: each axis uses n_i = ceil(side_i / h) cells of pitch side_i / n_i.
/// Cells are indexed row-major (last axis fastest).
template <int D>
class RasterGrid {
 public:
  RasterGrid() = default;
  RasterGrid(const Region<D>& region, double h) : region_(region), h_(h) {
    region.validate();
    if (!(h > 0.0)) throw std::invalid_argument("RasterGrid: pitch must be > 0");
    size_ = 1;
    for (int i = 0; i < D; ++i) {
      const double n = std::ceil(region.side(i) / h);
      if (n > 1e7) throw std::length_error("RasterGrid: too many cells");
      dims_[i] = std::max<std::int64_t>(1, static_cast<std::int64_t>(n));
      pitch_[i] = region.side(i) / static_cast<double>(dims_[i]);
      size_ *= static_cast<std::size_t>(dims_[i]);
    }
  }

  const Region<D>& region() const { return region_; }
  double requested_pitch() const { return h_; }
  double pitch(int axis) const { return pitch_[axis]; }
  double max_pitch() const {
    double m = pitch_[0];
    for (int i = 1; i < D; ++i) m = std::max(m, pitch_[i]);
    return m;
  }
  std::int64_t dim(int axis) const { return dims_[axis]; }
  std::size_t size() const { return size_; }
  double cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < D; ++i) v *= pitch_[i];
    return v;
  }

  std::array<std::int64_t, D> coords(std::size_t idx) const {
    std::array<std::int64_t, D> c;
    for (int i = D - 1; i >= 0; --i) {
      c[i] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(dims_[i]));
      idx /= static_cast<std::size_t>(dims_[i]);
    }
    return c;
  }

  Point<D> center(std::size_t idx) const {
    const auto c = coords(idx);
    Point<D> x;
    for (int i = 0; i < D; ++i) x[i] = region_.lo[i] + (static_cast<double>(c[i]) + 0.5) * pitch_[i];
    return x;
  }

  /// Whether the cell touches the region boundary.
  bool on_border(std::size_t idx) const {
    const auto c = coords(idx);
    for (int i = 0; i < D; ++i)
      if (c[i] == 0 || c[i] == dims_[i] - 1) return true;
    return false;
  }

 private:
  Region<D> region_;
  double h_ = 0.0;
  std::array<std::int64_t, D> dims_{};
  std::array<double, D> pitch_{};
  std::size_t size_ = 0;
};

/// A measurable subset of a raster (1 = included).
template <int D>
struct RasterMask {
  RasterGrid<D> grid;
  std::vector<char> included;

  double measure() const {
    std::size_t n = 0;
    for (char c : included) n += c != 0;
    return static_cast<double>(n) * grid.cell_volume();
  }
};

}  // namespace ppcloud
