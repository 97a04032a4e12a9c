// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ppcloud/extension.hpp"

using namespace ppcloud;

namespace {

LatticePartition<2> grid(int n, double s = 1.0) {
  return build_partition(Region<2>({-s / 2, -s / 2}, {n * s - s / 2, n * s - s / 2}), s);
}

LatticeField restrict_to_good(const std::vector<double>& values, const std::vector<char>& bad) {
  LatticeField v(values.size());
  for (std::size_t j = 0; j < values.size(); ++j)
    if (!bad[j]) v.set(j, values[j]);
  return v;
}

}  // namespace

TEST(Extend, SingleBadBoxHandExample) {
  const auto p = build_partition(Region<2>({-1.5, -1.5}, {1.5, 1.5}), 1.0);
  ASSERT_EQ(p.size(), 9u);
  std::vector<char> bad(9, 0);
  bad[*p.index_of(BoxId<2>{{0, 0}})] = 1;
  const auto g = components(classification_from_mask(bad), p);
  ASSERT_EQ(g.boundary[0].size(), 8u);
  const std::vector<double> ring{1, 2, 3, 3, 3, 3, 3, 3};
  std::vector<double> vals(9, 0.0);
  for (std::size_t i = 0; i < 8; ++i) vals[g.boundary[0][i]] = ring[i];
  const auto v = restrict_to_good(vals, bad);
  const auto tv = extend(v, g, p);
  EXPECT_DOUBLE_EQ(tv[*p.index_of(BoxId<2>{{0, 0}})], 2.625);
  EXPECT_DOUBLE_EQ(boundary_mean(v, g, 0), 21.0 / 8.0);
  const auto rep = extension_energy_report(v, tv, g, p, 1.0);
  EXPECT_NEAR(rep.correction_q, 4.5, 1e-12);
  EXPECT_EQ(rep.components, 1u);
  EXPECT_EQ(rep.max_component, 1u);
  EXPECT_EQ(rep.max_boundary, 8u);
}

TEST(Extend, NoBadBoxesIsIdentity) {
  const auto p = grid(6);
  std::vector<double> vals(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) vals[j] = std::sin(double(j));
  const std::vector<char> bad(p.size(), 0);
  const auto g = components(classification_from_mask(bad), p);
  const auto v = restrict_to_good(vals, bad);
  const auto tv = extend(v, g, p);
  EXPECT_EQ(tv.raw(), vals);
  EXPECT_EQ(extension_energy_report(v, tv, g, p, 1.5).correction_q, 0.0);
}

TEST(Extend, RejectsBadDomainAndSpanningComponent) {
  const auto p = grid(4);
  std::vector<char> bad(p.size(), 0);
  bad[5] = 1;
  const auto g = components(classification_from_mask(bad), p);
  EXPECT_THROW(extend(LatticeField::full(std::vector<double>(p.size(), 1.0)), g, p), std::invalid_argument);

  const std::vector<char> all(p.size(), 1);
  const auto gall = components(classification_from_mask(all), p);
  try {
    extend(LatticeField(p.size()), gall, p);
    FAIL() << "expected RegimeError";
  } catch (const RegimeError& e) {
    EXPECT_EQ(e.code(), "spanning_component");
  }
}

TEST(Extend, PropertiesOnRandomFields) {
  const int n = 15;
  const auto p = grid(n, 0.1);
  int tested = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    Rng rng(stream_seed(51, {t}));
    std::vector<char> bad(p.size());
    const double prob = rng.uniform(0.0, 0.45);
    for (auto& b : bad) b = rng.uniform() < prob;
    if (std::count(bad.begin(), bad.end(), 0) == 0) continue;
    std::vector<double> vals(p.size());
    for (auto& x : vals) x = rng.uniform(-5, 5);
    const auto g = components(classification_from_mask(bad), p);
    const auto v = restrict_to_good(vals, bad);
    const auto tv = extend(v, g, p);
    double lo = 1e300, hi = -1e300;
    for (std::size_t j : v.domain()) lo = std::min(lo, v[j]), hi = std::max(hi, v[j]);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!bad[j]) ASSERT_EQ(tv[j], v[j]);
      ASSERT_GE(tv[j], lo);
      ASSERT_LE(tv[j], hi);
    }
    // affine equivariance
    std::vector<double> shifted = vals;
    for (auto& x : shifted) x = 2.0 * x + 7.0;
    const auto ts = extend(restrict_to_good(shifted, bad), g, p);
    for (std::size_t j = 0; j < p.size(); ++j) ASSERT_NEAR(ts[j], 2.0 * tv[j] + 7.0, 1e-12);
    // constants
    const auto tc = extend(restrict_to_good(std::vector<double>(p.size(), 4.0), bad), g, p);
    for (std::size_t j = 0; j < p.size(); ++j) ASSERT_EQ(tc[j], 4.0);
    const auto rc = extension_energy_report(restrict_to_good(std::vector<double>(p.size(), 0.0), bad), 
                                            LatticeField::full(std::vector<double>(p.size(), 0.0)), g, p, 1.0);
    ASSERT_EQ(rc.total_energy_q + rc.correction_q + rc.norm_q, 0.0);
    ++tested;
  }
  EXPECT_GT(tested, 950);
}

TEST(Embed, NormsAndSingleBoxDistance) {
  const double s = 0.25;
  const auto p = grid(4, s);
  const Region<2> q = p.covered_region();
  const auto c = embed_lattice(LatticeField::full(std::vector<double>(p.size(), -2.0)), p);
  EXPECT_NEAR(lq_norm(c, q, 1.5), 2.0 * std::pow(q.volume(), 1.0 / 1.5), 1e-12);
  std::vector<double> w(p.size(), -2.0);
  w[7] += 0.3;
  const auto d = embed_lattice(LatticeField::full(w), p);
  EXPECT_NEAR(lq_distance(c, d, q, 1.5), 0.3 * std::pow(s * s, 1.0 / 1.5), 1e-12);
  EXPECT_EQ(lq_distance(c, c, q, 1.0), 0.0);
  EXPECT_THROW(embed_lattice(LatticeField(p.size()), p), std::invalid_argument);
}

TEST(Embed, CoarseLinearFieldWithinS) {
  const auto cloud = sample<2>(ProcessParams{1.0, 0.01, 2, 61}, unit_cube<2>());
  const auto u = CloudField<2>::from_function(cloud, [](const Point<2>& x) { return x[0]; });
  for (double s : {0.1, 0.2, 0.25}) {
    const auto p = build_partition(unit_cube<2>(), s);
    const auto v = coarse_field(u, p, std::vector<char>(p.size(), 0));
    const auto e = embed_lattice(v, p);
    const auto r = lq_distance<2>(e, [](const Point<2>& x) { return x[0]; }, unit_cube<2>(), 1.0);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.value, s);
  }
}

TEST(Embed, QuadratureExactForConstantDifference) {
  const auto p = grid(3, 0.5);
  const auto e = embed_lattice(LatticeField::full(std::vector<double>(p.size(), 1.0)), p);
  const auto r = lq_distance<2>(e, [](const Point<2>&) { return 0.0; }, p.covered_region(), 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::sqrt(p.covered_region().volume()), 1e-12);
}

TEST(Embed, StepDistanceAgreesWithMonteCarlo) {
  const Region<2> q({-0.5, -0.5}, {0.5, 0.5});
  const auto pa = build_partition(q, 0.1);
  const auto pb = build_partition(q, 0.07);
  Rng rng(71);
  std::vector<double> va(pa.size()), vb(pb.size());
  for (auto& x : va) x = rng.uniform(-1, 1);
  for (auto& x : vb) x = rng.uniform(-1, 1);
  const PiecewiseConstant<2> a{pa, va}, b{pb, vb};
  for (const Region<2>& r : {Region<2>({-0.5, -0.5}, {0.45, 0.45}), Region<2>({-0.31, -0.2}, {0.27, 0.4})}) {
    const double exact = lq_distance(a, b, r, 1.5);
    // oracle: Monte Carlo over r
    const int m = 1000000;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      const Point<2> x{rng.uniform(r.lo[0], r.hi[0]), rng.uniform(r.lo[1], r.hi[1])};
      const auto ax = a.at(x), bx = b.at(x);
      if (ax && bx) acc += std::pow(std::abs(*ax - *bx), 1.5);
    }
    const double mc = std::pow(acc / m * r.volume(), 1.0 / 1.5);
    EXPECT_NEAR(exact, mc, 0.01 * exact);
  }
  // shared partition: exact finite sum
  std::vector<double> vc(pa.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < pa.size(); ++j) {
    vc[j] = va[j] + 0.01 * double(j % 7);
    sum += std::pow(std::abs(va[j] - vc[j]), 1.5) * pa.box_volume();
  }
  EXPECT_NEAR(lq_distance(a, PiecewiseConstant<2>{pa, vc}, pa.covered_region(), 1.5), std::pow(sum, 1.0 / 1.5),
              1e-12);
}

TEST(Embed, MaskedRasterDistance) {
  const auto p = grid(4, 0.25);
  const auto e = embed_lattice(LatticeField::full(std::vector<double>(p.size(), 2.0)), p);
  RasterMask<2> mask{RasterGrid<2>(p.covered_region(), 0.01), {}};
  mask.included.assign(mask.grid.size(), 0);
  EXPECT_EQ(lq_distance<2>(e, [](const Point<2>&) { return 0.0; }, mask, 1.0), 0.0);
  std::fill(mask.included.begin(), mask.included.end(), 1);
  EXPECT_NEAR(lq_distance<2>(e, [](const Point<2>&) { return 0.0; }, mask, 1.0), 2.0, 1e-9);
  EXPECT_NEAR(mask.measure(), 1.0, 1e-12);
}
