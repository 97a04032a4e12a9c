// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ppcloud/lattice.hpp"
#include "ppcloud/lattice_field.hpp"
#include "ppcloud/parallel.hpp"
#include "ppcloud/point_process.hpp"

namespace ppcloud {

struct EnergyParams {
  double p = 2.0;        ///< energy exponent
  double s = 1.0;        ///< interaction range s_eps
  double epsilon = 1.0;  ///< point-cloud scale
  double q = 1.0;        ///< compactness exponent, 1 <= q < p

  void validate() const {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("EnergyParams: p must be >= 1");
    if (!(s > 0.0)) throw std::invalid_argument("EnergyParams: s must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("EnergyParams: epsilon must be > 0");
  }
  void validate_q() const {
    validate();
    if (!(q >= 1.0 && q < p)) throw std::invalid_argument("EnergyParams: need 1 <= q < p");
  }
};

/// |t|^e with the common integer exponents done by multiplication.
inline double abs_pow(double t, double e) {
  t = std::abs(t);
  if (e == 1.0) return t;
  if (e == 2.0) return t * t;
  return std::pow(t, e);
}

/// A real value for every point of a cloud. The cloud must outlive the field.
template <int D>
class CloudField {
 public:
  CloudField(const PointCloud<D>& cloud, std::vector<double> values)
      : cloud_(&cloud), values_(std::move(values)) {
    if (values_.size() != cloud.size())
      throw std::invalid_argument("CloudField: one value per cloud point required");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("CloudField: non-finite value");
  }

  template <class F>
  static CloudField from_function(const PointCloud<D>& cloud, F&& f) {
    std::vector<double> v;
    v.reserve(cloud.size());
    for (const auto& x : cloud.points()) v.push_back(f(x));
    return CloudField(cloud, std::move(v));
  }

  const PointCloud<D>& cloud() const { return *cloud_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  const PointCloud<D>* cloud_;
  std::vector<double> values_;
};

struct EnergyBreakdown {
  double total = 0.0;                    ///< eps^d * sum of per_point
  std::vector<std::size_t> points;       ///< indices of cloud points inside the region
  std::vector<double> per_point;         ///< |grad_s u(x)|^p, aligned with `points`
  double norm_p = 0.0;                   ///< eps^d * sum_{x in region} |u(x)|^p
};

/// Nonlocal p-Dirichlet energy
///   F(u; A) = eps^d sum_{x in A} (eps/s)^d sum_{|y-x| <= s} (|u(y)-u(x)|/s)^p,
/// with y ranging over the whole cloud. Deterministic for any thread count.
template <int D>
EnergyBreakdown cloud_energy(const CloudField<D>& u, const Region<D>& region,
                             const EnergyParams& params, unsigned threads = 1) {
  params.validate();
  const auto& cloud = u.cloud();
  if (!cloud.region().contains(region))
    throw std::invalid_argument("cloud_energy: region exceeds the cloud's support");

  EnergyBreakdown out;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (region.contains(cloud[i])) out.points.push_back(i);
  out.per_point.assign(out.points.size(), 0.0);

  const double s = params.s;
  const double pref = std::pow(params.epsilon / s, D);
  const CellIndex<D> index(cloud.points(), cloud.region(), s);
  const auto& vals = u.values();
  parallel_for(out.points.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const std::size_t i = out.points[k];
      const double ux = vals[i];
      double acc = 0.0;
      index.for_each_in_ball(cloud[i], s, [&](std::size_t j) { acc += abs_pow((vals[j] - ux) / s, params.p); });
      out.per_point[k] = pref * acc;
    }
  });

  const double epsd = std::pow(params.epsilon, D);
  double sum = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < out.points.size(); ++k) {
    sum += out.per_point[k];
    norm += abs_pow(vals[out.points[k]], params.p);
  }
  out.total = epsd * sum;
  out.norm_p = epsd * norm;
  return out;
}

/// Sum over ordered adjacent pairs (J, J'), both in the field's domain, of
/// |v(J) - v(J')|^e s^(d-e). Pairs with an undefined endpoint are skipped.
template <int D>
double lattice_energy(const LatticeField& v, const LatticePartition<D>& partition, double exponent,
                      Adjacency mode) {
  if (v.size() != partition.size()) throw std::invalid_argument("lattice_energy: size mismatch");
  if (v.domain_size() == 0) throw std::invalid_argument("lattice_energy: empty domain");
  const double w = std::pow(partition.s(), D - exponent);
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!v.defined(j)) continue;
    for (std::size_t k : partition.neighbors(j, mode))
      if (v.defined(k)) acc += abs_pow(v[j] - v[k], exponent);
  }
  return acc * w;
}

/// sum_J |v(J)|^e s^d over the field's domain.
template <int D>
double lattice_norm(const LatticeField& v, const LatticePartition<D>& partition, double exponent) {
  if (v.size() != partition.size()) throw std::invalid_argument("lattice_norm: size mismatch");
  if (v.domain_size() == 0) throw std::invalid_argument("lattice_norm: empty domain");
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (v.defined(j)) acc += abs_pow(v[j], exponent);
  return acc * partition.box_volume();
}

/// Per-box point counts (points outside every box are ignored).
template <int D>
std::vector<std::size_t> box_counts(const PointCloud<D>& cloud, const LatticePartition<D>& partition) {
  std::vector<std::size_t> counts(partition.size(), 0);
  for (const auto& x : cloud.points())
    if (auto j = partition.locate(x)) ++counts[*j];
  return counts;
}

/// Box means of u over the boxes not in `exclude` (mask by box index, 1 = excluded).
/// Throws std::domain_error if an included box holds no point.
template <int D>
LatticeField coarse_field(const CloudField<D>& u, const LatticePartition<D>& partition,
                          const std::vector<char>& exclude) {
  if (exclude.size() != partition.size()) throw std::invalid_argument("coarse_field: mask size mismatch");
  std::vector<double> sum(partition.size(), 0.0);
  std::vector<std::size_t> count(partition.size(), 0);
  const auto& cloud = u.cloud();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (auto j = partition.locate(cloud[i])) {
      sum[*j] += u[i];
      ++count[*j];
    }
  }
  LatticeField v(partition.size());
  for (std::size_t j = 0; j < partition.size(); ++j) {
    if (exclude[j]) continue;
    if (count[j] == 0) throw std::domain_error("coarse_field: included box contains no point");
    v.set(j, sum[j] / static_cast<double>(count[j]));
  }
  return v;
}

template <int D>
LatticeField coarse_field(const CloudField<D>& u, const LatticePartition<D>& partition,
                          const std::vector<BoxId<D>>& exclude) {
  std::vector<char> mask(partition.size(), 0);
  for (const auto& id : exclude)
    if (auto j = partition.index_of(id)) mask[*j] = 1;
  return coarse_field(u, partition, mask);
}

}  // namespace ppcloud
