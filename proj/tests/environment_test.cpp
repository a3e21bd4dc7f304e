#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dmfsim/environment.hpp"
#include "support/oracles.hpp"

using namespace dmfsim;

namespace {

std::vector<DisorderLaw> all_laws() {
  return {DisorderLaw::rademacher(), DisorderLaw::uniform_symmetric(3.0),
          DisorderLaw::laplace_centered(0.5), DisorderLaw::gaussian_centered(1.0)};
}

}  // namespace

TEST(DisorderLaw, AnalyticVariances) {
  EXPECT_DOUBLE_EQ(DisorderLaw::rademacher().variance(), 1.0);
  EXPECT_DOUBLE_EQ(DisorderLaw::uniform_symmetric(3.0).variance(), 3.0);
  EXPECT_DOUBLE_EQ(DisorderLaw::laplace_centered(0.5).variance(), 0.5);
  EXPECT_DOUBLE_EQ(DisorderLaw::gaussian_centered(2.0).variance(), 4.0);
}

TEST(DisorderLaw, RejectsNonpositiveParameters) {
  EXPECT_THROW(DisorderLaw::uniform_symmetric(0.0), std::invalid_argument);
  EXPECT_THROW(DisorderLaw::laplace_centered(-1.0), std::invalid_argument);
  EXPECT_THROW(DisorderLaw::gaussian_centered(0.0), std::invalid_argument);
}

TEST(SampleEnvironment, RademacherSupport) {
  auto draw = sample_environment(DisorderLaw::rademacher(), 4, 7);
  ASSERT_EQ(draw.values.size(), 4u);
  for (double u : draw.values) EXPECT_TRUE(u == 1.0 || u == -1.0);
}

TEST(SampleEnvironment, GaussianMeanCltBound) {
  auto draw = sample_environment(DisorderLaw::gaussian_centered(1.0), 1000000, 11);
  EXPECT_LT(std::abs(mean(draw.values)), 4.0 / 1000.0);
}

TEST(SampleEnvironment, UniformVarianceMatches) {
  auto draw = sample_environment(DisorderLaw::uniform_symmetric(3.0), 1000000, 13);
  EXPECT_NEAR(variance(draw.values), 3.0, 0.02 * 3.0);
}

TEST(SampleEnvironment, CenteringEveryLaw) {
  for (const auto& law : all_laws()) {
    auto draw = sample_environment(law, 1000000, 17);
    EXPECT_LT(std::abs(mean(draw.values)), 5.0 * law.std_dev() / 1000.0);
  }
}

TEST(SampleEnvironment, PrefixPropertyAndDeterminism) {
  for (const auto& law : all_laws()) {
    auto small = sample_environment(law, 100, 23);
    auto large = sample_environment(law, 257, 23);
    for (std::size_t j = 0; j < small.size(); ++j)
      EXPECT_EQ(small.values[j], large.values[j]);
    auto again = sample_environment(law, 100, 23);
    EXPECT_EQ(small.values, again.values);
    auto other = sample_environment(law, 100, 24);
    EXPECT_NE(small.values, other.values);
  }
}

TEST(SampleEnvironment, RejectsEmpty) {
  EXPECT_THROW(sample_environment(DisorderLaw::rademacher(), 0, 1),
               std::invalid_argument);
}

TEST(ScaledPartialSums, HandCases) {
  EnvironmentDraw draw{DisorderLaw::rademacher(), 0, {1.0, -1.0, 1.0, 1.0}};
  auto s = scaled_partial_sums(draw);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s[3], 1.0);  // 2 / sqrt(4)
  EnvironmentDraw single{DisorderLaw::gaussian_centered(1.0), 0, {0.37}};
  EXPECT_DOUBLE_EQ(scaled_partial_sums(single)[0], 0.37);
}

TEST(ScaledPartialSums, CumulativeIdentity) {
  auto draw = sample_environment(DisorderLaw::laplace_centered(0.5), 200, 31);
  auto s = scaled_partial_sums(draw);
  for (std::size_t n = 1; n < draw.size(); ++n) {
    const double prev = s[n - 1] * std::sqrt(static_cast<double>(n));
    const double cur = s[n] * std::sqrt(static_cast<double>(n + 1));
    EXPECT_NEAR(cur - prev, draw.values[n], 1e-9);
  }
}

TEST(EnvironmentStatistics, HandCases) {
  EnvironmentDraw pm{DisorderLaw::rademacher(), 0, {1.0, -1.0}};
  auto st = environment_statistics(pm);
  EXPECT_DOUBLE_EQ(st.var_gap, 0.0);
  EXPECT_NEAR(st.abs3_term, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(st.s_n, 0.0);
  EXPECT_FALSE(st.lil_envelope.has_value());  // N = 2 < 3

  EnvironmentDraw zeros{DisorderLaw::rademacher(), 0, {0.0, 0.0, 0.0}};
  auto z = environment_statistics(zeros);
  EXPECT_DOUBLE_EQ(z.s_n, 0.0);
  EXPECT_DOUBLE_EQ(z.abs3_term, 0.0);
  EXPECT_DOUBLE_EQ(z.var_gap, 1.0);  // |0 - sigma^2|
  ASSERT_TRUE(z.lil_envelope.has_value());
  EXPECT_NEAR(*z.lil_envelope, 2.0 * std::sqrt(std::log(std::log(3.0))), 1e-15);
}

TEST(EnvironmentStatistics, IngredientDecayOverSeeds) {
  // Median abs3_term and var_gap must drop strictly from N=256 to N=4096.
  const auto law = DisorderLaw::laplace_centered(0.5);
  std::vector<double> abs3_small, abs3_big, gap_small, gap_big;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    auto s = environment_statistics(sample_environment(law, 256, 1000 + seed));
    auto b = environment_statistics(sample_environment(law, 4096, 1000 + seed));
    abs3_small.push_back(s.abs3_term);
    abs3_big.push_back(b.abs3_term);
    gap_small.push_back(s.var_gap);
    gap_big.push_back(b.var_gap);
  }
  EXPECT_LT(median(abs3_big), median(abs3_small));
  EXPECT_LT(median(gap_big), median(gap_small));
}

TEST(EnvironmentStatistics, LilEnvelopeFraction) {
  const std::size_t n = 1 << 16;
  const double envelope = 2.0 * std::sqrt(std::log(std::log(static_cast<double>(n))));
  int inside = 0;
  const int seeds = 120;
  for (int seed = 0; seed < seeds; ++seed) {
    auto draw = sample_environment(DisorderLaw::rademacher(), n, 5000 + seed);
    auto st = environment_statistics(draw);
    if (std::abs(st.s_n) <= envelope) ++inside;
  }
  EXPECT_GT(static_cast<double>(inside) / seeds, 0.95);
}

TEST(ExpMoment, GaussianClosedFormOracle) {
  // S_N of standard Gaussian disorder is exactly N(0,1) for every N.
  const double expected = oracles::folded_exp_moment(1.0);
  EXPECT_NEAR(expected, 2.0 * std::exp(0.5) * norm_cdf(1.0), 1e-10);
  auto est = exp_moment_estimate(DisorderLaw::gaussian_centered(1.0), 1.0, 64, 20000, 41);
  EXPECT_FALSE(est.saturated);
  EXPECT_NEAR(est.mean, expected, 4.0 * est.ci / 1.96);
}

TEST(ExpMoment, TinyGammaGoesToOne) {
  auto est = exp_moment_estimate(DisorderLaw::rademacher(), 1e-8, 32, 200, 43);
  EXPECT_NEAR(est.mean, 1.0, 1e-6);
}

TEST(ExpMoment, RademacherBoundedOverGrid) {
  for (std::size_t n : {16, 64, 256, 1024, 4096}) {
    auto est = exp_moment_estimate(DisorderLaw::rademacher(), 1.0, n, 2000, 47);
    EXPECT_FALSE(est.saturated);
    EXPECT_LT(est.mean, 4.0);  // sup over the grid stays under one constant
  }
}

TEST(ExpMoment, SaturationFlagged) {
  auto est = exp_moment_estimate(DisorderLaw::gaussian_centered(1.0), 800.0, 1, 200, 53);
  EXPECT_TRUE(est.saturated);
  EXPECT_TRUE(std::isfinite(est.mean));
}

TEST(ExpMoment, RejectsFewReplicates) {
  EXPECT_THROW(exp_moment_estimate(DisorderLaw::rademacher(), 1.0, 8, 99, 1),
               std::invalid_argument);
}

TEST(ExpMoment, WitnessAlphaStableUnderDoubling) {
  // Sample mean of exp(alpha |U|) settles near its closed-form value.
  struct Case {
    DisorderLaw law;
    double expected;
  };
  const std::vector<Case> cases = {
      {DisorderLaw::rademacher(), std::exp(1.0)},
      {DisorderLaw::uniform_symmetric(3.0), std::exp(1.0) - 1.0},
      {DisorderLaw::laplace_centered(0.5), 2.0},
      {DisorderLaw::gaussian_centered(1.0), 2.0 * std::exp(0.5) * norm_cdf(1.0)},
  };
  for (const auto& c : cases) {
    const double alpha = c.law.exp_moment_alpha();
    auto draw_half = sample_environment(c.law, 100000, 61);
    auto draw_full = sample_environment(c.law, 200000, 61);
    auto est = [&](const EnvironmentDraw& d) {
      KahanSum acc;
      for (double u : d.values) acc.add(std::exp(alpha * std::abs(u)));
      return acc.value() / static_cast<double>(d.size());
    };
    const double half = est(draw_half);
    const double full = est(draw_full);
    EXPECT_LT(std::abs(half - full), 0.15 * full);
    EXPECT_NEAR(full, c.expected, 0.10 * c.expected);
  }
}

TEST(NormQuantile, RoundTripAgainstCdf) {
  // Above x ~ 5.5 the CDF saturates toward 1 and the round trip loses
  // resolution through p itself; the lower tail keeps full precision.
  for (double x = -8.0; x <= 5.5; x += 0.25)
    EXPECT_NEAR(norm_quantile(norm_cdf(x)), x, 1e-9);
  for (double p : {0.01, 0.1, 0.3})
    EXPECT_NEAR(norm_quantile(p) + norm_quantile(1.0 - p), 0.0, 1e-12);
  EXPECT_LT(norm_quantile(1e-300), -37.0);
  EXPECT_TRUE(std::isfinite(norm_quantile(1e-300)));
  EXPECT_NEAR(norm_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_THROW(norm_quantile(0.0), std::domain_error);
}
