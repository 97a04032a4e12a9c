// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ppcloud/bounds.hpp"
#include "ppcloud/energy.hpp"
#include "ppcloud/errors.hpp"
#include "ppcloud/lattice.hpp"
#include "ppcloud/point_process.hpp"

namespace ppcloud {

/// Good/bad labelling of a partition: J is bad iff
/// |#points in Q_s(J) - expected| >= kappa * expected, expected = gamma s^d / eps^d.
struct Classification {
  double kappa = 0.5;
  double expected = 0.0;
  std::vector<std::size_t> counts;  ///< by box index
  std::vector<char> bad;            ///< by box index, 1 = bad

  std::size_t size() const { return bad.size(); }
  bool is_bad(std::size_t j) const { return bad[j] != 0; }
  std::size_t bad_count() const { return static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1)); }

  std::vector<std::size_t> bad_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < bad.size(); ++j)
      if (bad[j]) out.push_back(j);
    return out;
  }
  std::vector<std::size_t> good_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < bad.size(); ++j)
      if (!bad[j]) out.push_back(j);
    return out;
  }
};

inline bool is_bad_count(std::size_t count, double expected, double kappa) {
  return std::abs(static_cast<double>(count) - expected) >= kappa * expected;
}

/// Build a classification from an explicit bad mask (no counts).
inline Classification classification_from_mask(std::vector<char> bad, double kappa = 0.5) {
  Classification c;
  c.kappa = kappa;
  c.counts.assign(bad.size(), 0);
  c.bad = std::move(bad);
  return c;
}

template <int D>
Classification classify(const PointCloud<D>& cloud, const LatticePartition<D>& partition, double kappa,
                        double gamma) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("classify: kappa must be in (0,1)");
  if (!(gamma > 0.0)) throw std::invalid_argument("classify: gamma must be > 0");
  Classification c;
  c.kappa = kappa;
  c.expected = gamma * std::pow(partition.s() / cloud.params().epsilon, D);
  if (c.expected < 1.0)
    throw RegimeError("expected_below_one",
                      "classify: expected box count below one; s is too small for epsilon");
  c.counts = box_counts(cloud, partition);
  c.bad.resize(partition.size());
  for (std::size_t j = 0; j < partition.size(); ++j) c.bad[j] = is_bad_count(c.counts[j], c.expected, kappa) ? 1 : 0;
  return c;
}

/// Face-connected components of the bad set and their boundaries.
struct ComponentGraph {
  std::vector<std::vector<std::size_t>> members;   ///< ascending box indices
  std::vector<std::vector<std::size_t>> boundary;  ///< good boxes touching the component (face or corner)
  std::vector<std::int64_t> component_of;          ///< by box index, -1 for good boxes

  std::size_t count() const { return members.size(); }
  std::size_t max_size() const {
    std::size_t m = 0;
    for (const auto& c : members) m = std::max(m, c.size());
    return m;
  }
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace detail

/// Components are numbered by their smallest member index.
template <int D>
ComponentGraph components(const Classification& cls, const LatticePartition<D>& partition) {
  if (cls.size() != partition.size()) throw std::invalid_argument("components: size mismatch");
  const std::size_t n = partition.size();
  detail::UnionFind uf(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!cls.is_bad(j)) continue;
    for (std::size_t k : partition.neighbors(j, Adjacency::face))
      if (k > j && cls.is_bad(k)) uf.unite(j, k);
  }
  ComponentGraph g;
  g.component_of.assign(n, -1);
  std::vector<std::int64_t> id_of_root(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    if (!cls.is_bad(j)) continue;
    const std::size_t r = uf.find(j);
    if (id_of_root[r] < 0) {
      id_of_root[r] = static_cast<std::int64_t>(g.members.size());
      g.members.emplace_back();
    }
    g.component_of[j] = id_of_root[r];
    g.members[static_cast<std::size_t>(id_of_root[r])].push_back(j);
  }
  g.boundary.resize(g.members.size());
  for (std::size_t c = 0; c < g.members.size(); ++c) {
    auto& b = g.boundary[c];
    for (std::size_t j : g.members[c])
      for (std::size_t k : partition.neighbors(j, Adjacency::diagonal))
        if (!cls.is_bad(k)) b.push_back(k);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
  }
  return g;
}

/// True iff the good boxes form a single face-connected set (vacuously true
/// when there are none).
template <int D>
bool good_is_connected(const Classification& cls, const LatticePartition<D>& partition) {
  const auto good = cls.good_indices();
  if (good.empty()) return true;
  std::vector<char> seen(partition.size(), 0);
  std::deque<std::size_t> queue{good.front()};
  seen[good.front()] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t j = queue.front();
    queue.pop_front();
    for (std::size_t k : partition.neighbors(j, Adjacency::face)) {
      if (cls.is_bad(k) || seen[k]) continue;
      seen[k] = 1;
      ++reached;
      queue.push_back(k);
    }
  }
  return reached == good.size();
}

/// Shortest diagonal path inside the boundary of component `comp` from box
/// `from` to box `to` (both box indices in that boundary). Returns nullopt
/// when the boundary is not diagonally connected between them.
template <int D>
std::optional<std::vector<std::size_t>> boundary_path(const ComponentGraph& graph, std::size_t comp,
                                                      std::size_t from, std::size_t to,
                                                      const LatticePartition<D>& partition) {
  if (comp >= graph.count()) throw std::out_of_range("boundary_path: no such component");
  const auto& bnd = graph.boundary[comp];
  auto in_boundary = [&](std::size_t j) { return std::binary_search(bnd.begin(), bnd.end(), j); };
  if (!in_boundary(from) || !in_boundary(to))
    throw std::invalid_argument("boundary_path: endpoints must lie in the component boundary");
  if (from == to) return std::vector<std::size_t>{from};

  std::vector<std::int64_t> prev(bnd.size(), -1);
  auto pos = [&](std::size_t j) {
    return static_cast<std::size_t>(std::lower_bound(bnd.begin(), bnd.end(), j) - bnd.begin());
  };
  std::deque<std::size_t> queue{from};
  prev[pos(from)] = static_cast<std::int64_t>(from);
  while (!queue.empty()) {
    const std::size_t j = queue.front();
    queue.pop_front();
    if (j == to) break;
    for (std::size_t k : partition.neighbors(j, Adjacency::diagonal)) {
      if (!in_boundary(k)) continue;
      auto& pk = prev[pos(k)];
      if (pk >= 0) continue;
      pk = static_cast<std::int64_t>(j);
      queue.push_back(k);
    }
  }
  if (prev[pos(to)] < 0) return std::nullopt;
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(static_cast<std::size_t>(prev[pos(path.back())]));
  std::reverse(path.begin(), path.end());
  return path;
}

/// Whether the boundary of component `comp` is diagonally connected.
template <int D>
bool boundary_connected(const ComponentGraph& graph, std::size_t comp, const LatticePartition<D>& partition) {
  const auto& bnd = graph.boundary[comp];
  if (bnd.size() <= 1) return true;
  std::vector<char> seen(bnd.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t k : partition.neighbors(bnd[i], Adjacency::diagonal)) {
      auto it = std::lower_bound(bnd.begin(), bnd.end(), k);
      if (it == bnd.end() || *it != k) continue;
      const auto t = static_cast<std::size_t>(it - bnd.begin());
      if (seen[t]) continue;
      seen[t] = 1;
      ++reached;
      queue.push_back(t);
    }
  }
  return reached == bnd.size();
}

/// Longest shortest boundary path of a component (its boundary's diagonal
/// diameter), or nullopt if the boundary is not diagonally connected.
template <int D>
std::optional<std::size_t> max_boundary_path(const ComponentGraph& graph, std::size_t comp,
                                             const LatticePartition<D>& partition) {
  const auto& bnd = graph.boundary[comp];
  if (bnd.empty()) return std::size_t{0};
  std::size_t longest = 1;
  for (std::size_t a = 0; a < bnd.size(); ++a) {
    // one BFS per source
    std::vector<std::int64_t> dist(bnd.size(), -1);
    std::deque<std::size_t> queue{a};
    dist[a] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t k : partition.neighbors(bnd[i], Adjacency::diagonal)) {
        auto it = std::lower_bound(bnd.begin(), bnd.end(), k);
        if (it == bnd.end() || *it != k) continue;
        const auto t = static_cast<std::size_t>(it - bnd.begin());
        if (dist[t] >= 0) continue;
        dist[t] = dist[i] + 1;
        longest = std::max(longest, static_cast<std::size_t>(dist[t]));
        ++reached;
        queue.push_back(t);
      }
    }
    if (reached != bnd.size()) return std::nullopt;
  }
  return longest;
}

/// Per-realization evaluation of the controlled-subfamily conditions.
struct ControlledCertificate {
  bool n0_ok = true;            ///< good set path connected
  std::size_t bad_count = 0;
  std::size_t max_component = 0;
  double volume_bound = 0.0;    ///< #bad * s^d
  double rho0 = 0.0;
  bool volume_ok = true;        ///< #bad * s^d <= s^rho0
  bool decay_ok = true;         ///< #bad <= eps^rho0 / s^d
  double lambda_hat = 0.0;      ///< max_component / log(1/s)
  double bad_fraction = 0.0;
  bool subcritical = true;      ///< bad_fraction below the site-percolation threshold
};

template <int D>
ControlledCertificate certify(const Classification& cls, const ComponentGraph& graph,
                              const LatticePartition<D>& partition, double rho0_target, double epsilon) {
  ControlledCertificate c;
  const double s = partition.s();
  const double sd = partition.box_volume();
  c.n0_ok = good_is_connected(cls, partition);
  c.bad_count = cls.bad_count();
  c.max_component = graph.max_size();
  c.volume_bound = static_cast<double>(c.bad_count) * sd;
  c.rho0 = rho0_target;
  c.volume_ok = c.volume_bound <= std::pow(s, rho0_target);
  c.decay_ok = static_cast<double>(c.bad_count) <= std::pow(epsilon, rho0_target) / sd;
  c.lambda_hat = s < 1.0 ? static_cast<double>(c.max_component) / std::log(1.0 / s) : 0.0;
  c.bad_fraction = partition.size() ? static_cast<double>(c.bad_count) / static_cast<double>(partition.size()) : 0.0;
  c.subcritical = c.bad_fraction < site_percolation_threshold(D);
  return c;
}

/// Lambda fitted over a sweep: the largest observed max_component / log(1/s).
inline double fit_lambda(const std::vector<ControlledCertificate>& certs) {
  double m = 0.0;
  for (const auto& c : certs) m = std::max(m, c.lambda_hat);
  return m;
}

}  // namespace ppcloud
