// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ppcloud/random.hpp"

using namespace ppcloud;

TEST(Random, StreamsAreReproducibleAndDistinct) {
  Rng a(stream_seed(7, {1, 2})), b(stream_seed(7, {1, 2}));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t t = 0; t < 1000; ++t)
    for (std::uint64_t e = 0; e < 4; ++e) seeds.insert(stream_seed(7, {t, e}));
  EXPECT_EQ(seeds.size(), 4000u);
  EXPECT_NE(stream_seed(7, {1, 2}), stream_seed(7, {2, 1}));
}

TEST(Random, UniformInUnitInterval) {
  Rng r(1);
  double mean = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    mean += u;
  }
  EXPECT_NEAR(mean / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Random, LogFactorialMatchesLgamma) {
  for (std::uint64_t k : {0ull, 1ull, 5ull, 63ull, 64ull, 100ull, 1000ull, 123456ull})
    EXPECT_NEAR(detail::log_factorial(k), std::lgamma(static_cast<double>(k) + 1.0),
                1e-12 * std::max(1.0, std::lgamma(static_cast<double>(k) + 1.0)));
}

class PoissonMoments : public ::testing::TestWithParam<double> {};

TEST_P(PoissonMoments, MeanAndVarianceMatchLambda) {
  const double lambda = GetParam();
  Rng r(stream_seed(99, {static_cast<std::uint64_t>(lambda * 1000)}));
  const int m = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double k = static_cast<double>(sample_poisson(r, lambda));
    s1 += k;
    s2 += k * k;
  }
  const double mean = s1 / m;
  const double var = s2 / m - mean * mean;
  EXPECT_NEAR(mean, lambda, 4.0 * std::sqrt(lambda / m));
  EXPECT_NEAR(var / lambda, 1.0, 0.03);
}

INSTANTIATE_TEST_SUITE_P(Lambdas, PoissonMoments, ::testing::Values(0.5, 3.0, 29.9, 30.0, 64.0, 500.0, 1e5));

TEST(Random, PoissonPmfAtSmallAndLargeLambda) {
  // chi-square style check of the pmf near the mode for both sampler branches
  for (double lambda : {12.0, 45.0}) {
    Rng r(5);
    const int m = 400000;
    std::vector<int> hist(200, 0);
    for (int i = 0; i < m; ++i) {
      const auto k = sample_poisson(r, lambda);
      if (k < hist.size()) ++hist[k];
    }
    for (int k = static_cast<int>(lambda) - 5; k <= static_cast<int>(lambda) + 5; ++k) {
      const double pk = std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
      const double se = std::sqrt(pk * (1 - pk) / m);
      EXPECT_NEAR(static_cast<double>(hist[k]) / m, pk, 5.0 * se) << "lambda=" << lambda << " k=" << k;
    }
  }
}
