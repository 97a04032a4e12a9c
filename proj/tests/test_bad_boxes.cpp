// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ppcloud/bad_boxes.hpp"
#include "ppcloud/bounds.hpp"

using namespace ppcloud;

namespace {

// 20 x 20 boxes with integer coordinates 0..19 (s = 1).
LatticePartition<2> grid(int n, double s = 1.0) {
  return build_partition(Region<2>({-s / 2, -s / 2}, {n * s - s / 2, n * s - s / 2}), s);
}

std::size_t at(const LatticePartition<2>& p, std::int64_t a, std::int64_t b) {
  return *p.index_of(BoxId<2>{{a, b}});
}

// Oracle: flood fill on integer coordinates, no partition neighbor lists, no union-find.
std::set<std::set<std::pair<int, int>>> bfs_components(const std::vector<char>& bad, int n) {
  std::set<std::set<std::pair<int, int>>> out;
  std::vector<char> seen(bad.size(), 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (!bad[a * n + b] || seen[a * n + b]) continue;
      std::set<std::pair<int, int>> comp;
      std::vector<std::pair<int, int>> stack{{a, b}};
      seen[a * n + b] = 1;
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        comp.insert({x, y});
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int u = x + dx[k], v = y + dy[k];
          if (u < 0 || v < 0 || u >= n || v >= n || !bad[u * n + v] || seen[u * n + v]) continue;
          seen[u * n + v] = 1;
          stack.push_back({u, v});
        }
      }
      out.insert(comp);
    }
  return out;
}

std::set<std::pair<int, int>> oracle_boundary(const std::set<std::pair<int, int>>& comp,
                                              const std::vector<char>& bad, int n) {
  std::set<std::pair<int, int>> out;
  for (auto [x, y] : comp)
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        const int u = x + dx, v = y + dy;
        if (u < 0 || v < 0 || u >= n || v >= n || bad[u * n + v]) continue;
        out.insert({u, v});
      }
  return out;
}

}  // namespace

TEST(Classify, ThresholdUsesGreaterOrEqual) {
  EXPECT_TRUE(is_bad_count(49, 100.0, 0.5));
  EXPECT_FALSE(is_bad_count(51, 100.0, 0.5));
  EXPECT_TRUE(is_bad_count(150, 100.0, 0.5));
  EXPECT_TRUE(is_bad_count(50, 100.0, 0.5));
  EXPECT_FALSE(is_bad_count(149, 100.0, 0.5));
  // kappa -> 1: only empty boxes or >= twice the mean
  EXPECT_TRUE(is_bad_count(0, 100.0, 0.999999));
  EXPECT_FALSE(is_bad_count(1, 100.0, 0.999999));
  EXPECT_FALSE(is_bad_count(199, 100.0, 0.999999));
  EXPECT_TRUE(is_bad_count(200, 100.0, 0.999999));
}

TEST(Classify, CloudClassificationMatchesCounts) {
  const double eps = 0.01, s = 0.1;
  const auto cloud = sample<2>(ProcessParams{1.0, eps, 2, 17}, unit_cube<2>());
  const auto part = build_partition(unit_cube<2>(), s);
  const auto cls = classify(cloud, part, 0.2, 1.0);
  EXPECT_NEAR(cls.expected, 100.0, 1e-9);
  for (std::size_t j = 0; j < part.size(); ++j) {
    EXPECT_EQ(cls.counts[j], count_in(cloud, part.box_region(j)));
    EXPECT_EQ(cls.is_bad(j), is_bad_count(cls.counts[j], 100.0, 0.2));
  }
  EXPECT_THROW(classify(cloud, part, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(classify(cloud, build_partition(unit_cube<2>(), 0.005), 0.5, 1.0), RegimeError);
  try {
    classify(cloud, build_partition(unit_cube<2>(), 0.005), 0.5, 1.0);
  } catch (const RegimeError& e) {
    EXPECT_EQ(e.code(), "expected_below_one");
  }
}

TEST(Classify, MonotoneInKappa) {
  const auto cloud = sample<2>(ProcessParams{1.0, 0.02, 2, 18}, unit_cube<2>());
  const auto part = build_partition(unit_cube<2>(), 0.1);
  const auto lo = classify(cloud, part, 0.1, 1.0), hi = classify(cloud, part, 0.3, 1.0);
  for (std::size_t j = 0; j < part.size(); ++j)
    if (hi.is_bad(j)) EXPECT_TRUE(lo.is_bad(j));
}

TEST(Components, HandExample) {
  const auto p = grid(5);
  std::vector<char> bad(p.size(), 0);
  bad[at(p, 0, 0)] = bad[at(p, 0, 1)] = bad[at(p, 2, 2)] = 1;
  const auto g = components(classification_from_mask(bad), p);
  ASSERT_EQ(g.count(), 2u);
  EXPECT_EQ(g.members[0], (std::vector<std::size_t>{at(p, 0, 0), at(p, 0, 1)}));
  EXPECT_EQ(g.members[1], (std::vector<std::size_t>{at(p, 2, 2)}));
  EXPECT_EQ(g.boundary[1].size(), 8u);
  EXPECT_EQ(g.max_size(), 2u);
}

TEST(Components, EmptyBadSet) {
  const auto p = grid(4);
  const auto cls = classification_from_mask(std::vector<char>(p.size(), 0));
  const auto g = components(cls, p);
  EXPECT_EQ(g.count(), 0u);
  EXPECT_TRUE(good_is_connected(cls, p));
  const auto cert = certify(cls, g, p, 1.0 / 48.0, 0.1);
  EXPECT_EQ(cert.max_component, 0u);
  EXPECT_TRUE(cert.n0_ok && cert.volume_ok && cert.decay_ok);
}

TEST(Components, AgreeWithBfsOracleOnRandomMasks) {
  const int n = 20;
  const auto p = grid(n);
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(stream_seed(41, {t}));
    const double prob = rng.uniform(0.05, 0.7);
    std::vector<char> bad(p.size());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) bad[at(p, a, b)] = rng.uniform() < prob;
    std::vector<char> flat(n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) flat[a * n + b] = bad[at(p, a, b)];

    const auto g = components(classification_from_mask(bad), p);
    std::set<std::set<std::pair<int, int>>> got;
    for (std::size_t c = 0; c < g.count(); ++c) {
      std::set<std::pair<int, int>> comp;
      for (std::size_t j : g.members[c]) comp.insert({int(p.box(j).coords[0]), int(p.box(j).coords[1])});
      std::set<std::pair<int, int>> bnd;
      for (std::size_t j : g.boundary[c]) bnd.insert({int(p.box(j).coords[0]), int(p.box(j).coords[1])});
      EXPECT_EQ(bnd, oracle_boundary(comp, flat, n));
      got.insert(comp);
    }
    ASSERT_EQ(got, bfs_components(flat, n)) << "mask " << t;
  }
}

TEST(Components, GoodConnectivity) {
  const auto p = grid(6);
  std::vector<char> bad(p.size(), 0);
  for (int b = 0; b < 6; ++b) bad[at(p, 3, b)] = 1;  // separating row
  EXPECT_FALSE(good_is_connected(classification_from_mask(bad), p));
  bad[at(p, 3, 5)] = 0;
  EXPECT_TRUE(good_is_connected(classification_from_mask(bad), p));
  // diagonal-only contact does not connect the good set
  std::vector<char> diag(p.size(), 1);
  diag[at(p, 0, 0)] = diag[at(p, 1, 1)] = 0;
  EXPECT_FALSE(good_is_connected(classification_from_mask(diag), p));
}

TEST(BoundaryPath, SingleBoxRing) {
  const auto p = grid(5);
  std::vector<char> bad(p.size(), 0);
  bad[at(p, 2, 2)] = 1;
  const auto g = components(classification_from_mask(bad), p);
  const auto path = boundary_path(g, 0, at(p, 1, 1), at(p, 3, 3), p);
  ASSERT_TRUE(path.has_value());
  EXPECT_LE(path->size(), 8u);
  EXPECT_EQ(path->front(), at(p, 1, 1));
  EXPECT_EQ(path->back(), at(p, 3, 3));
  EXPECT_EQ(*boundary_path(g, 0, at(p, 1, 2), at(p, 1, 2), p), (std::vector<std::size_t>{at(p, 1, 2)}));
  EXPECT_THROW(boundary_path(g, 0, at(p, 0, 0), at(p, 1, 1), p), std::invalid_argument);
  EXPECT_TRUE(boundary_connected(g, 0, p));
  EXPECT_EQ(max_boundary_path(g, 0, p), std::optional<std::size_t>(4));
}

TEST(BoundaryPath, PathsAreValidAndShort) {
  const int n = 12;
  const auto p = grid(n);
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(stream_seed(42, {t}));
    std::vector<char> bad(p.size());
    for (auto& b : bad) b = rng.uniform() < 0.3;
    const auto g = components(classification_from_mask(bad), p);
    for (std::size_t c = 0; c < g.count(); ++c) {
      const auto& bnd = g.boundary[c];
      if (bnd.size() < 2) continue;
      const auto path = boundary_path(g, c, bnd.front(), bnd.back(), p);
      if (!path) {
        EXPECT_FALSE(boundary_connected(g, c, p));
        continue;
      }
      EXPECT_LE(path->size(), bnd.size());
      std::set<std::size_t> uniq(path->begin(), path->end());
      EXPECT_EQ(uniq.size(), path->size());
      for (std::size_t i = 0; i < path->size(); ++i) {
        EXPECT_TRUE(std::binary_search(bnd.begin(), bnd.end(), (*path)[i]));
        if (i) {
          const auto nb = p.neighbors((*path)[i - 1], Adjacency::diagonal);
          EXPECT_TRUE(std::binary_search(nb.begin(), nb.end(), (*path)[i]));
        }
      }
    }
  }
}

TEST(Bounds, ChernoffArithmetic) {
  EXPECT_DOUBLE_EQ(bad_box_bound(36.0, 0.5), std::exp(-12.0));
  EXPECT_NEAR(bad_box_bound(36.0, 0.5), 6.14421235e-6, 1e-13);
  EXPECT_NEAR(chernoff_bound(20.0, 20.0), std::exp(-20.0), 1e-20);
  EXPECT_LT(poisson_rate_bound(36.0, 0.5), 1.0);
}

TEST(Bounds, RhoKappaHandValue) {
  // (0.25)^2 * 2 * 1 * 2 * 0.25 / 1.5 = 1/24
  EXPECT_NEAR(rho_kappa(0.5, 2, 1.0, 0.5), 1.0 / 24.0, 1e-15);
  EXPECT_NEAR(rho_kappa(0.5, 2, 1.0, 0.5) / 2.0, 1.0 / 48.0, 1e-15);
  EXPECT_DOUBLE_EQ(beta_threshold(1.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(beta_threshold(4.0, 2), 0.5);
  EXPECT_DOUBLE_EQ(site_percolation_threshold(2), 0.592746);
}

TEST(Certificate, VolumeAndDecay) {
  const auto p = grid(10, 0.1);
  std::vector<char> bad(p.size(), 0);
  bad[at(p, 3, 3)] = bad[at(p, 3, 4)] = 1;
  const auto cls = classification_from_mask(bad);
  const auto g = components(cls, p);
  const auto c = certify(cls, g, p, 0.5, 0.05);
  EXPECT_EQ(c.bad_count, 2u);
  EXPECT_NEAR(c.volume_bound, 0.02, 1e-15);
  EXPECT_TRUE(c.volume_ok);  // 0.02 <= 0.1^0.5
  EXPECT_TRUE(c.decay_ok);   // 2 <= 0.05^0.5 / 0.01
  EXPECT_NEAR(c.lambda_hat, 2.0 / std::log(10.0), 1e-12);
  EXPECT_NEAR(fit_lambda({c, ControlledCertificate{}}), c.lambda_hat, 0.0);
}
