// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <type_traits>
#include <vector>

#include "ppcloud/bad_boxes.hpp"
#include "ppcloud/energy.hpp"
#include "ppcloud/errors.hpp"
#include "ppcloud/lattice.hpp"
#include "ppcloud/lattice_field.hpp"
#include "ppcloud/raster.hpp"

namespace ppcloud {

/// Boundary average (v)_U = mean of v over the boundary of component `comp`.
inline double boundary_mean(const LatticeField& v, const ComponentGraph& graph, std::size_t comp) {
  const auto& bnd = graph.boundary[comp];
  if (bnd.empty())
    throw RegimeError("spanning_component", "extend: bad component with empty boundary");
  double acc = 0.0;
  for (std::size_t j : bnd) acc += v[j];
  return acc / static_cast<double>(bnd.size());
}

/// Extension T: keeps v on the good boxes and fills every bad component with
/// the unweighted mean of v over that component's boundary.
///
/// v must be defined exactly on the boxes that belong to no component.
/// Boundaries clipped by the partition edge are averaged over what remains.
template <int D>
LatticeField extend(const LatticeField& v, const ComponentGraph& graph, const LatticePartition<D>& partition) {
  if (v.size() != partition.size() || graph.component_of.size() != partition.size())
    throw std::invalid_argument("extend: size mismatch");
  for (std::size_t j = 0; j < v.size(); ++j) {
    const bool in_component = graph.component_of[j] >= 0;
    if (in_component == v.defined(j))
      throw std::invalid_argument("extend: field domain must equal the complement of the components");
  }
  std::vector<double> out = v.raw();
  for (std::size_t c = 0; c < graph.count(); ++c) {
    const double fill = boundary_mean(v, graph, c);
    for (std::size_t j : graph.members[c]) out[j] = fill;
  }
  return LatticeField::full(std::move(out));
}

struct ExtensionEnergyReport {
  double total_energy_q = 0.0;       ///< face-pair q-energy of Tv
  double good_pair_energy_q = 0.0;   ///< face-pair q-energy of v over good-good pairs
  double correction_q = 0.0;         ///< sum_U sum_{J in bd U} |v(J) - (v)_U|^q s^(d-q)
  double norm_q = 0.0;               ///< sum_J |Tv(J)|^q s^d
  double input_norm_q = 0.0;         ///< sum_{J good} |v(J)|^q s^d
  std::size_t components = 0;
  std::size_t max_component = 0;
  std::size_t max_boundary = 0;
};

template <int D>
ExtensionEnergyReport extension_energy_report(const LatticeField& v, const LatticeField& tv,
                                              const ComponentGraph& graph,
                                              const LatticePartition<D>& partition, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("extension_energy_report: q must be >= 1");
  ExtensionEnergyReport r;
  r.total_energy_q = lattice_energy(tv, partition, q, Adjacency::face);
  r.good_pair_energy_q = v.domain_size() ? lattice_energy(v, partition, q, Adjacency::face) : 0.0;
  r.norm_q = lattice_norm(tv, partition, q);
  r.input_norm_q = v.domain_size() ? lattice_norm(v, partition, q) : 0.0;
  const double w = std::pow(partition.s(), D - q);
  for (std::size_t c = 0; c < graph.count(); ++c) {
    const double mean = boundary_mean(v, graph, c);
    for (std::size_t j : graph.boundary[c]) r.correction_q += abs_pow(v[j] - mean, q) * w;
    r.max_boundary = std::max(r.max_boundary, graph.boundary[c].size());
  }
  r.components = graph.count();
  r.max_component = graph.max_size();
  return r;
}

/// Step function constant on each box of a partition.
template <int D>
struct PiecewiseConstant {
  LatticePartition<D> partition;
  std::vector<double> values;  ///< by box index

  /// Value at x, or nullopt outside the union of boxes.
  std::optional<double> at(const Point<D>& x) const {
    if (auto j = partition.locate(x)) return values[*j];
    return std::nullopt;
  }
};

template <int D>
PiecewiseConstant<D> embed_lattice(const LatticeField& v, const LatticePartition<D>& partition) {
  if (v.size() != partition.size() || !v.is_full())
    throw std::invalid_argument("embed_lattice: field must be defined on the whole partition");
  return PiecewiseConstant<D>{partition, v.raw()};
}

/// (int_{region} |f|^q)^(1/q), exact.
template <int D>
double lq_norm(const PiecewiseConstant<D>& f, const Region<D>& region, double q) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    const double vol = f.partition.box_region(j).overlap_volume(region);
    if (vol > 0.0) acc += abs_pow(f.values[j], q) * vol;
  }
  return std::pow(acc, 1.0 / q);
}

namespace detail {

struct AxisOverlap {
  std::int64_t a = 0;  ///< offset into a's extent on this axis
  std::int64_t b = 0;
  double length = 0.0;
};

template <int D>
std::vector<AxisOverlap> axis_overlaps(const LatticePartition<D>& pa, const LatticePartition<D>& pb,
                                       const Region<D>& region, int axis) {
  std::vector<AxisOverlap> out;
  const double lo = region.lo[axis], hi = region.hi[axis];
  std::int64_t jb = 0;
  for (std::int64_t ia = 0; ia < pa.extent(axis); ++ia) {
    const std::int64_t ka = pa.kmin(axis) + ia;
    const double a0 = std::max(lo, LatticePartition<D>::lower_face(ka, pa.s()));
    const double a1 = std::min(hi, LatticePartition<D>::upper_face(ka, pa.s()));
    if (a1 <= a0) continue;
    while (jb < pb.extent(axis) && LatticePartition<D>::upper_face(pb.kmin(axis) + jb, pb.s()) <= a0) ++jb;
    for (std::int64_t ib = jb; ib < pb.extent(axis); ++ib) {
      const std::int64_t kb = pb.kmin(axis) + ib;
      const double b0 = LatticePartition<D>::lower_face(kb, pb.s());
      if (b0 >= a1) break;
      const double l = std::min(a1, LatticePartition<D>::upper_face(kb, pb.s())) - std::max(a0, b0);
      if (l > 0.0) out.push_back({ia, ib, l});
    }
  }
  return out;
}

}  // namespace detail

/// (int |a - b|^q)^(1/q) over region intersected with both supports; exact
/// for step functions on any two partitions (tensor-product box overlaps).
template <int D>
double lq_distance(const PiecewiseConstant<D>& a, const PiecewiseConstant<D>& b, const Region<D>& region,
                   double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_distance: q must be >= 1");
  std::array<std::vector<detail::AxisOverlap>, D> ov;
  for (int i = 0; i < D; ++i) {
    ov[i] = detail::axis_overlaps(a.partition, b.partition, region, i);
    if (ov[i].empty()) return 0.0;
  }
  std::array<std::size_t, D> c{};
  double acc = 0.0;
  for (;;) {
    BoxId<D> ia, ib;
    double vol = 1.0;
    for (int i = 0; i < D; ++i) {
      const auto& o = ov[i][c[i]];
      ia.coords[i] = a.partition.kmin(i) + o.a;
      ib.coords[i] = b.partition.kmin(i) + o.b;
      vol *= o.length;
    }
    acc += abs_pow(a.values[*a.partition.index_of(ia)] - b.values[*b.partition.index_of(ib)], q) * vol;
    int i = D - 1;
    while (i >= 0 && c[i] + 1 == ov[i].size()) c[i--] = 0;
    if (i < 0) break;
    ++c[i];
  }
  return std::pow(acc, 1.0 / q);
}

struct QuadratureResult {
  double value = 0.0;
  bool converged = false;
  int subdivisions = 0;  ///< midpoint cells per box edge at the last level
};

/// (int_{region ∩ support(a)} |a - f|^q)^(1/q) for a smooth f, by midpoint
/// rule on every box, doubling the subdivision until the integral changes by
/// less than rel_tol (relative). Non-convergence is reported, not thrown.
template <int D>
QuadratureResult lq_distance(const PiecewiseConstant<D>& a, const std::type_identity_t<std::function<double(const Point<D>&)>>& f,
                             const Region<D>& region, double q, double rel_tol = 1e-4,
                             std::size_t max_evaluations = 50'000'000) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_distance: q must be >= 1");
  auto integrate = [&](int m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j) {
      const Region<D> box = a.partition.box_region(j);
      if (box.overlap_volume(region) <= 0.0) continue;
      Point<D> lo, hi;
      for (int i = 0; i < D; ++i) {
        lo[i] = std::max(box.lo[i], region.lo[i]);
        hi[i] = std::min(box.hi[i], region.hi[i]);
      }
      std::array<double, D> h;
      double cell = 1.0;
      for (int i = 0; i < D; ++i) {
        h[i] = (hi[i] - lo[i]) / m;
        cell *= h[i];
      }
      std::array<int, D> c{};
      double sub = 0.0;
      for (;;) {
        Point<D> x;
        for (int i = 0; i < D; ++i) x[i] = lo[i] + (c[i] + 0.5) * h[i];
        sub += abs_pow(a.values[j] - f(x), q);
        int i = D - 1;
        while (i >= 0 && c[i] + 1 == m) c[i--] = 0;
        if (i < 0) break;
        ++c[i];
      }
      acc += sub * cell;
    }
    return acc;
  };
  QuadratureResult r;
  int m = 1;
  double prev = integrate(m);
  for (;;) {
    const double next_cost = static_cast<double>(a.values.size()) * std::pow(2.0 * m, D);
    if (next_cost > static_cast<double>(max_evaluations)) {
      r.value = std::pow(prev, 1.0 / q);
      r.subdivisions = m;
      r.converged = false;
      return r;
    }
    m *= 2;
    const double cur = integrate(m);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur) || (cur == 0.0 && prev == 0.0)) {
      r.value = std::pow(cur, 1.0 / q);
      r.subdivisions = m;
      r.converged = true;
      return r;
    }
    prev = cur;
  }
}

/// Raster-sum (sum_{cells in mask} |a - f|^q |cell|)^(1/q); cells outside the
/// support of a are skipped.
template <int D>
double lq_distance(const PiecewiseConstant<D>& a, const std::type_identity_t<std::function<double(const Point<D>&)>>& f,
                   const RasterMask<D>& mask, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_distance: q must be >= 1");
  double acc = 0.0;
  for (std::size_t c = 0; c < mask.grid.size(); ++c) {
    if (!mask.included[c]) continue;
    const auto x = mask.grid.center(c);
    if (auto v = a.at(x)) acc += abs_pow(*v - f(x), q);
  }
  return std::pow(acc * mask.grid.cell_volume(), 1.0 / q);
}

}  // namespace ppcloud
