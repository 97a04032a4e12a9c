// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "ppcloud/regularity.hpp"

using namespace ppcloud;

namespace {

std::size_t brute_nearest(const PointCloud<2>& c, const Point<2>& y) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (dist2<2>(c[i], y) < dist2<2>(c[best], y)) best = i;
  return best;
}

double brute_clearance(const PointCloud<2>& c, const Region<2>& r, const Point<2>& y, std::size_t x) {
  double m = r.distance_to_boundary(y);
  for (std::size_t z = 0; z < c.size(); ++z)
    if (z != x) m = std::min(m, (dist2<2>(c[z], y) - dist2<2>(c[x], y)) / (2.0 * dist<2>(c[x], c[z])));
  return m;
}

// Jittered square lattice with spacing l*eps.
PointCloud<2> jittered(double l, double eps, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point<2>> pts;
  const double h = l * eps;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      pts.push_back({(a + 0.5) * h + rng.uniform(-h / 10.01, h / 10.01), (b + 0.5) * h + rng.uniform(-h / 10.01, h / 10.01)});
  return PointCloud<2>(pts, ProcessParams{1.0, eps, 2, seed}, Region<2>({0, 0}, {n * h, n * h}));
}

}  // namespace

TEST(Rasterize, SinglePoint) {
  const PointCloud<2> c({{0.1, 0.2}}, ProcessParams{1.0, 0.8, 2, 0}, unit_cube<2>());
  const auto vr = rasterize(c, c.region(), 0.1);
  for (auto l : vr.labels) EXPECT_EQ(l, 0u);
  EXPECT_THROW(rasterize(c, c.region(), 0.2), std::invalid_argument);
  const PointCloud<2> empty({}, ProcessParams{1.0, 0.8, 2, 0}, unit_cube<2>());
  EXPECT_THROW(rasterize(empty, empty.region(), 0.05), std::invalid_argument);
}

TEST(Rasterize, SymmetricPairSplitsAlongBisector) {
  const PointCloud<2> c({{-0.25, 0.1}, {0.25, 0.1}}, ProcessParams{1.0, 0.4, 2, 0}, unit_cube<2>());
  const auto vr = rasterize(c, c.region(), 0.05);
  for (std::size_t k = 0; k < vr.grid.size(); ++k) {
    const auto y = vr.grid.center(k);
    if (std::abs(y[0]) > vr.grid.max_pitch()) EXPECT_EQ(vr.labels[k], y[0] < 0 ? 0u : 1u);
  }
}

TEST(Rasterize, LabelsAndClearanceMatchBruteForce) {
  const auto c = sample<2>(ProcessParams{1.0, 0.05, 2, 81}, unit_cube<2>());
  const auto vr = rasterize(c, c.region(), 0.05 / 8, 2);
  Rng rng(82);
  for (int i = 0; i < 1000; ++i) {
    const auto k = static_cast<std::size_t>(rng.uniform() * double(vr.grid.size()));
    const auto y = vr.grid.center(k);
    const auto want = brute_nearest(c, y);
    ASSERT_EQ(vr.labels[k], want);
    ASSERT_NEAR(vr.clearance[k], brute_clearance(c, c.region(), y, want), 1e-12);
  }
  // raster areas per label sum to the region area
  std::vector<double> area(c.size(), 0.0);
  for (auto l : vr.labels) area[l] += vr.grid.cell_volume();
  double tot = 0.0;
  for (double a : area) tot += a;
  EXPECT_NEAR(tot, 1.0, 1e-9);
  EXPECT_EQ(rasterize(c, c.region(), 0.05 / 8, 1).labels, vr.labels);
}

TEST(Regularity, AlphaExtremes) {
  const auto c = sample<2>(ProcessParams{1.0, 0.1, 2, 83}, unit_cube<2>());
  const auto vr = rasterize(c, c.region(), 0.1 / 8);
  const auto tiny = regular_subcloud(vr, c, 1e-9);
  for (std::size_t x = 0; x < c.size(); ++x)
    if (tiny.cell_count[x] > 0 && tiny.inradius_est[x] > 0) EXPECT_TRUE(tiny.regular[x]);
  EXPECT_EQ(regular_subcloud(vr, c, 100.0).regular_count(), 0u);
}

TEST(Regularity, MonotoneInAlpha) {
  const auto c = sample<2>(ProcessParams{1.0, 0.05, 2, 84}, unit_cube<2>());
  const auto vr = rasterize(c, c.region(), 0.05 / 8);
  const double alphas[] = {0.05, 0.1, 0.2, 0.4, 0.8};
  for (int i = 0; i + 1 < 5; ++i) {
    const auto lo = regular_subcloud(vr, c, alphas[i]), hi = regular_subcloud(vr, c, alphas[i + 1]);
    for (std::size_t x = 0; x < c.size(); ++x)
      if (hi.regular[x]) EXPECT_TRUE(lo.regular[x]);
  }
}

TEST(Regularity, JitteredLatticeInteriorIsRegular) {
  const double l = 1.0, eps = 0.1;
  const int n = 8;
  const auto c = jittered(l, eps, n, 85);
  const auto vr = rasterize(c, c.region(), eps / 16);
  const auto rep = regular_subcloud(vr, c, l / 4);
  for (int a = 1; a < n - 1; ++a)
    for (int b = 1; b < n - 1; ++b) EXPECT_TRUE(rep.regular[a * n + b]) << a << "," << b;
}

TEST(Regularity, RefinementStability) {
  const auto c = sample<2>(ProcessParams{1.0, 0.05, 2, 86}, unit_cube<2>());
  const double h = 0.05 / 8;
  const auto v1 = rasterize(c, c.region(), h), v2 = rasterize(c, c.region(), h / 2);
  const auto r1 = regular_subcloud(v1, c, 0.1), r2 = regular_subcloud(v2, c, 0.1);
  for (std::size_t x = 0; x < c.size(); ++x)
    if (r1.cell_count[x] > 0) EXPECT_LE(std::abs(r1.inradius_est[x] - r2.inradius_est[x]), h);
  const auto u = CloudField<2>::from_function(c, [](const Point<2>& x) { return x[0]; });
  const std::function<double(const Point<2>&)> target = [](const Point<2>& x) { return x[0]; };
  // use the same regular set for both resolutions so only the quadrature changes
  const Region<2> q({-0.4, -0.4}, {0.4, 0.4});
  const double d1 = convergence_distance(u, target, v1, r1, q, 1.5);
  const double d2 = convergence_distance(u, target, v2, r1, q, 1.5);
  EXPECT_LE(std::abs(d1 - d2), 0.05 * d2);
}

TEST(ConvergenceDistance, Trivial) {
  const auto c = sample<2>(ProcessParams{1.0, 0.05, 2, 87}, unit_cube<2>());
  const auto vr = rasterize(c, c.region(), 0.05 / 8);
  const auto rep = regular_subcloud(vr, c, 0.1);
  const auto ucst = CloudField<2>::from_function(c, [](const Point<2>&) { return 1.5; });
  EXPECT_EQ(convergence_distance<2>(ucst, [](const Point<2>&) { return 1.5; }, vr, rep, c.region(), 1.5), 0.0);
  const auto mask = regular_region_mask(vr, c, rep, c.region());
  const double m = mask.measure();
  EXPECT_GT(m, 0.0);
  EXPECT_NEAR(convergence_distance<2>(ucst, [](const Point<2>&) { return 0.0; }, vr, rep, c.region(), 1.5),
              1.5 * std::pow(m, 1.0 / 1.5), 1e-12);
}

TEST(ConvergenceDistance, LinearTargetShrinksWithEpsilon) {
  const Region<2> q = unit_cube<2>();
  double prev = 1e9;
  for (double eps : {0.1, 0.05, 0.025}) {
    const auto c = sample<2>(ProcessParams{1.0, eps, 2, 88}, q);
    const auto vr = rasterize(c, q, eps / 8);
    const auto rep = regular_subcloud(vr, c, 0.1);
    const auto u = CloudField<2>::from_function(c, [](const Point<2>& x) { return x[0]; });
    const double d = convergence_distance<2>(u, [](const Point<2>& x) { return x[0]; }, vr, rep, q, 1.5);
    EXPECT_LT(d, prev);
    EXPECT_LT(d, 2.0 * eps);
    prev = d;
  }
}
