#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "dmfsim/coupling.hpp"
#include "support/oracles.hpp"

using namespace dmfsim;

TEST(ExactGaussian, HandCase) {
  const double sigma = 2.0;
  EnvironmentDraw draw{DisorderLaw::gaussian_centered(sigma), 0, {sigma, -sigma}};
  auto env = couple_exact_gaussian(draw);
  ASSERT_EQ(env.beta.size(), 2u);
  EXPECT_DOUBLE_EQ(env.beta[0], 1.0);
  EXPECT_DOUBLE_EQ(env.beta[1], 0.0);
  EXPECT_DOUBLE_EQ(env.k_stat, 0.0);
}

TEST(ExactGaussian, WalkMatchesBetaEverywhere) {
  auto draw = sample_environment(DisorderLaw::gaussian_centered(1.7), 500, 71);
  auto env = couple_exact_gaussian(draw);
  KahanSum walk;
  for (std::size_t n = 1; n <= draw.size(); ++n) {
    walk.add(draw.values[n - 1]);
    EXPECT_NEAR(walk.value(), 1.7 * env.beta[n - 1], 1e-10);
    EXPECT_NEAR(env.w_series[n - 1],
                1.7 * env.beta[n - 1] / std::sqrt(static_cast<double>(n)), 1e-15);
  }
}

TEST(ExactGaussian, RejectsNonGaussianLaw) {
  auto draw = sample_environment(DisorderLaw::rademacher(), 8, 1);
  EXPECT_THROW(couple_exact_gaussian(draw), std::invalid_argument);
}

TEST(NaiveQuantile, ComonotoneSignsForRademacher) {
  auto draw = sample_environment(DisorderLaw::rademacher(), 300, 73);
  auto env = couple_naive_quantile(draw, 74);
  double prev = 0.0;
  for (std::size_t j = 0; j < draw.size(); ++j) {
    const double incr = env.beta[j] - prev;
    prev = env.beta[j];
    if (draw.values[j] > 0.0) EXPECT_GT(incr, 0.0);
    else EXPECT_LT(incr, 0.0);
  }
}

TEST(NaiveQuantile, GaussianRecoversExactCoupling) {
  const double sigma = 0.8;
  auto draw = sample_environment(DisorderLaw::gaussian_centered(sigma), 200, 79);
  auto env = couple_naive_quantile(draw, 80);
  double prev = 0.0;
  for (std::size_t j = 0; j < draw.size(); ++j) {
    const double incr = env.beta[j] - prev;
    prev = env.beta[j];
    EXPECT_NEAR(incr, draw.values[j] / sigma, 1e-8);
  }
}

TEST(NaiveQuantile, KStatisticGrows) {
  // The per-step coupling misses the ln N rate: the error walk is a
  // nondegenerate random walk, so sup_n |.|/ln n grows like sqrt(N)/ln N.
  std::vector<double> k_small = sample_k_statistics(
      CouplerKind::NaiveQuantile, DisorderLaw::rademacher(), 1 << 8, 200, 83, 2);
  std::vector<double> k_big = sample_k_statistics(
      CouplerKind::NaiveQuantile, DisorderLaw::rademacher(), 1 << 16, 200, 83, 2);
  EXPECT_GT(median(k_big), 2.0 * median(k_small));
}

TEST(KStatistic, HandCase) {
  const double k = k_statistic({1.0, -1.0}, {0.5, 0.5}, 1.0);
  EXPECT_NEAR(k, 0.5 / std::log(2.0), 1e-12);
}

TEST(KStatistic, JointSignFlipInvariance) {
  auto draw = sample_environment(DisorderLaw::laplace_centered(1.0), 64, 89);
  auto env = couple_naive_quantile(draw, 90);
  std::vector<double> neg_u(draw.values), neg_beta(env.beta);
  for (double& v : neg_u) v = -v;
  for (double& v : neg_beta) v = -v;
  EXPECT_EQ(k_statistic(draw.values, env.beta, 1.0), k_statistic(neg_u, neg_beta, 1.0));
}

TEST(DyadicKmt, SupportAndDeterminism) {
  auto env = couple_kmt_dyadic(6, 97);
  ASSERT_EQ(env.draw.values.size(), 64u);
  for (double u : env.draw.values) EXPECT_TRUE(u == 1.0 || u == -1.0);
  auto again = couple_kmt_dyadic(6, 97);
  EXPECT_EQ(env.draw.values, again.draw.values);
  EXPECT_EQ(env.beta, again.beta);
}

TEST(DyadicKmt, ParameterErrors) {
  EXPECT_THROW(couple_kmt_dyadic(0, 1), std::invalid_argument);
  EXPECT_THROW(couple_kmt_dyadic(21, 1), std::invalid_argument);
  EXPECT_THROW(couple_environment(CouplerKind::DyadicKmt, DisorderLaw::rademacher(), 48, 1),
               std::invalid_argument);
  EXPECT_THROW(
      couple_environment(CouplerKind::DyadicKmt, DisorderLaw::gaussian_centered(1.0), 64, 1),
      std::invalid_argument);
}

TEST(DyadicKmt, LengthTwoConditionals) {
  // S_2 = +-2 forces both steps; S_2 = 0 leaves U_1 uniform on {-1,+1}
  // (enumerating the two walks with S_2 = 0).
  int n_zero = 0, n_zero_left_plus = 0;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    auto env = couple_kmt_dyadic(1, 1000 + seed);
    const double total = env.draw.values[0] + env.draw.values[1];
    if (total == 2.0) {
      EXPECT_DOUBLE_EQ(env.draw.values[0], 1.0);
      EXPECT_DOUBLE_EQ(env.draw.values[1], 1.0);
    } else if (total == -2.0) {
      EXPECT_DOUBLE_EQ(env.draw.values[0], -1.0);
    } else {
      ++n_zero;
      if (env.draw.values[0] > 0.0) ++n_zero_left_plus;
    }
  }
  ASSERT_GT(n_zero, 1000);
  const double frac = static_cast<double>(n_zero_left_plus) / n_zero;
  EXPECT_NEAR(frac, 0.5, 3.0 * 0.5 / std::sqrt(static_cast<double>(n_zero)));
}

TEST(DyadicKmt, PerCoordinateMarginals) {
  // 0.05 must stay a >4 sigma band simultaneously over all 1024
  // coordinates, hence the seed count.
  const int seeds = 2500;
  const std::size_t n = 1 << 10;
  std::vector<int> plus_count(n, 0);
  for (int s = 0; s < seeds; ++s) {
    auto env = couple_kmt_dyadic(10, 2000 + s);
    for (std::size_t j = 0; j < n; ++j)
      if (env.draw.values[j] > 0.0) ++plus_count[j];
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double p = static_cast<double>(plus_count[j]) / seeds;
    EXPECT_NEAR(p, 0.5, 0.05);
  }
}

TEST(DyadicKmt, TotalSumMatchesBinomialChiSquare) {
  // Exact binomial reference at N = 64, chi-square with bins of expected
  // count >= 5 merged, alpha = 1e-3.
  const std::size_t n = 64;
  const int reps = 4000;
  std::map<int, int> counts;
  for (int s = 0; s < reps; ++s) {
    auto env = couple_kmt_dyadic(6, 30000 + s);
    int plus = 0;
    for (double u : env.draw.values)
      if (u > 0.0) ++plus;
    counts[plus]++;
  }
  LogFactorialTable lf(n);
  std::vector<double> expected(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    expected[k] = std::exp(lf.log_choose(n, k) - static_cast<double>(n) * std::log(2.0)) *
                  reps;
  // merge tails until every bin expects >= 5
  double chi2 = 0.0;
  int bins = 0;
  double acc_exp = 0.0, acc_obs = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    acc_exp += expected[k];
    acc_obs += counts.count(static_cast<int>(k)) ? counts[static_cast<int>(k)] : 0;
    if (acc_exp >= 5.0) {
      chi2 += (acc_obs - acc_exp) * (acc_obs - acc_exp) / acc_exp;
      ++bins;
      acc_exp = acc_obs = 0.0;
    }
  }
  if (acc_exp > 0.0) {
    chi2 += (acc_obs - acc_exp) * (acc_obs - acc_exp) / std::max(acc_exp, 1e-9);
    ++bins;
  }
  ASSERT_GT(bins, 5);
  EXPECT_LT(chi2, chi2_critical(static_cast<double>(bins - 1), 1e-3));
}

TEST(Couplers, BetaIncrementsStandardNormalKs) {
  // One-dimensional KS of unit-time increments against N(0,1), 1% level.
  auto ks_of = [](const std::vector<double>& beta) {
    std::vector<double> incr;
    incr.reserve(beta.size());
    double prev = 0.0;
    for (double b : beta) {
      incr.push_back(b - prev);
      prev = b;
    }
    return ks_statistic(std::move(incr), [](double x) { return norm_cdf(x); });
  };
  auto dyadic = couple_kmt_dyadic(14, 101);
  EXPECT_LT(ks_of(dyadic.beta), ks_critical(dyadic.beta.size(), 0.01));
  auto naive = couple_naive_quantile(
      sample_environment(DisorderLaw::laplace_centered(0.7), 10000, 103), 104);
  EXPECT_LT(ks_of(naive.beta), ks_critical(10000, 0.01));
  auto exact = couple_exact_gaussian(
      sample_environment(DisorderLaw::gaussian_centered(2.5), 10000, 105));
  EXPECT_LT(ks_of(exact.beta), ks_critical(10000, 0.01));
}

TEST(Couplers, WSeriesNormalityAtFixedN) {
  // W^[N] = sigma beta_N / sqrt N must be N(0, sigma^2) for each coupler.
  const double sigma_l = DisorderLaw::laplace_centered(0.7).std_dev();
  std::vector<double> w_dyadic, w_naive;
  for (int s = 0; s < 2000; ++s) {
    w_dyadic.push_back(couple_kmt_dyadic(8, 40000 + s).w_n());
    w_naive.push_back(
        couple_naive_quantile(
            sample_environment(DisorderLaw::laplace_centered(0.7), 256, 50000 + s),
            60000 + s)
            .w_n());
  }
  EXPECT_LT(ks_statistic(std::move(w_dyadic), [](double x) { return norm_cdf(x); }),
            ks_critical(2000, 0.01));
  EXPECT_LT(ks_statistic(std::move(w_naive),
                         [sigma_l](double x) { return norm_cdf(x / sigma_l); }),
            ks_critical(2000, 0.01));
}

TEST(Couplers, MedianKStaysBoundedForDyadic) {
  auto k_small = sample_k_statistics(CouplerKind::DyadicKmt, DisorderLaw::rademacher(),
                                     1 << 8, 100, 107, 2);
  auto k_big = sample_k_statistics(CouplerKind::DyadicKmt, DisorderLaw::rademacher(),
                                   1 << 12, 100, 107, 2);
  const double m_small = median(k_small);
  const double m_big = median(k_big);
  EXPECT_LT(std::max(m_small, m_big) / std::min(m_small, m_big), 3.0);
}

TEST(Couplers, WSeriesFluctuatesAcrossN) {
  // Restated non-convergence smoke test: along one coupled path the range
  // of W^[n] over n <= 2^16 exceeds sigma.
  auto env = couple_kmt_dyadic(16, 109);
  const auto [lo, hi] = std::minmax_element(env.w_series.begin(), env.w_series.end());
  EXPECT_GT(*hi - *lo, 1.0);
}

TEST(KTailProfile, DegenerateForExactCoupler) {
  auto profile = k_tail_profile(CouplerKind::ExactGaussian,
                                DisorderLaw::gaussian_centered(1.0), 512, 200, 113, 2);
  EXPECT_TRUE(profile.degenerate);
  EXPECT_THROW(k_tail_profile(CouplerKind::ExactGaussian,
                              DisorderLaw::gaussian_centered(1.0), 512, 199, 1, 1),
               std::invalid_argument);
}

TEST(KTailProfile, DyadicTailDecaysLogLinearly) {
  auto profile = k_tail_profile(CouplerKind::DyadicKmt, DisorderLaw::rademacher(),
                                1 << 10, 400, 127, 2);
  ASSERT_FALSE(profile.degenerate);
  for (std::size_t i = 1; i < profile.tail_freq.size(); ++i)
    EXPECT_LE(profile.tail_freq[i], profile.tail_freq[i - 1]);
  EXPECT_GT(profile.lambda_hat, 0.0);
  EXPECT_GT(profile.r2, 0.8);
}

TEST(Couplers, PrefixStabilityOfPerIndexCouplers) {
  // Same seed, larger N: disorder values and beta extend the same path for
  // the per-index couplers.
  auto small = couple_environment(CouplerKind::NaiveQuantile,
                                  DisorderLaw::laplace_centered(1.0), 100, 131);
  auto large = couple_environment(CouplerKind::NaiveQuantile,
                                  DisorderLaw::laplace_centered(1.0), 200, 131);
  for (std::size_t j = 0; j < 100; ++j) {
    EXPECT_EQ(small.draw.values[j], large.draw.values[j]);
    EXPECT_NEAR(small.beta[j], large.beta[j], 1e-12);
  }
}
