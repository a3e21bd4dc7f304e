#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dmfsim/environment.hpp"
#include "dmfsim/parallel.hpp"
#include "dmfsim/rng.hpp"
#include "dmfsim/stats.hpp"

namespace dmfsim {

enum class CouplerKind { ExactGaussian, NaiveQuantile, DyadicKmt };

inline const char* coupler_name(CouplerKind kind) {
  switch (kind) {
    case CouplerKind::ExactGaussian: return "exact-gaussian";
    case CouplerKind::NaiveQuantile: return "naive-quantile";
    case CouplerKind::DyadicKmt: return "dyadic-kmt";
  }
  return "?";
}

// A disorder draw together with a Brownian motion evaluated at integer
// times, built on the same probability space. w_series[n-1] holds the
// Gaussian environment sigma * beta_n / sqrt(n); k_stat is the coupling
// constant max_{2<=n<=N} |sum_{j<=n} U_j - sigma beta_n| / ln n.
struct CoupledEnvironment {
  EnvironmentDraw draw;
  std::vector<double> beta;      // beta_1 .. beta_N
  std::vector<double> w_series;  // W^[1] .. W^[N]
  double k_stat = 0.0;
  CouplerKind coupler = CouplerKind::ExactGaussian;

  double w_n() const { return w_series.back(); }
};

inline double k_statistic(const std::vector<double>& values,
                          const std::vector<double>& beta, double sigma) {
  if (values.size() != beta.size())
    throw std::invalid_argument("k_statistic: walk/beta size mismatch");
  KahanSum walk;
  walk.add(values.empty() ? 0.0 : values[0]);
  double k = 0.0;
  for (std::size_t n = 2; n <= values.size(); ++n) {
    walk.add(values[n - 1]);
    double err = std::abs(walk.value() - sigma * beta[n - 1]);
    k = std::max(k, err / std::log(static_cast<double>(n)));
  }
  return k;
}

inline double k_statistic(const CoupledEnvironment& env) {
  return k_statistic(env.draw.values, env.beta, env.draw.law.std_dev());
}

namespace detail {

inline std::vector<double> w_series_from_beta(const std::vector<double>& beta,
                                              double sigma) {
  std::vector<double> w(beta.size());
  for (std::size_t n = 1; n <= beta.size(); ++n)
    w[n - 1] = sigma * beta[n - 1] / std::sqrt(static_cast<double>(n));
  return w;
}

inline constexpr std::uint64_t kNaiveAtomStream = stream_tag("naive-quantile-atoms");
inline constexpr std::uint64_t kDyadicStream = stream_tag("dyadic-bridge");

}  // namespace detail

// Degenerate coupling, valid only for Gaussian disorder: beta is the
// rescaled walk itself, so the coupling error vanishes identically.
inline CoupledEnvironment couple_exact_gaussian(const EnvironmentDraw& draw) {
  if (draw.law.kind() != DisorderKind::GaussianCentered)
    throw std::invalid_argument("couple_exact_gaussian: unsupported coupler for non-Gaussian law");
  const double sigma = draw.law.std_dev();
  CoupledEnvironment env;
  env.draw = draw;
  env.coupler = CouplerKind::ExactGaussian;
  env.beta.resize(draw.size());
  KahanSum walk;
  for (std::size_t j = 0; j < draw.size(); ++j) {
    walk.add(draw.values[j]);
    env.beta[j] = walk.value() / sigma;
  }
  env.w_series = detail::w_series_from_beta(env.beta, sigma);
  env.k_stat = 0.0;  // identically zero by construction
  return env;
}

// Per-step comonotone coupling through the distributional transform.
// Both marginals are exact, but the per-step errors accumulate as a
// nondegenerate random walk -- this coupler demonstrably misses the ln N
// rate and exists as the baseline.
inline CoupledEnvironment couple_naive_quantile(const EnvironmentDraw& draw,
                                                std::uint64_t seed) {
  CoupledEnvironment env;
  env.draw = draw;
  env.coupler = CouplerKind::NaiveQuantile;
  env.beta.resize(draw.size());
  CounterRng atoms(derive_seed(seed, detail::kNaiveAtomStream));
  KahanSum bm;
  for (std::size_t j = 0; j < draw.size(); ++j) {
    double p = draw.law.distributional_transform(draw.values[j], atoms.unit_at(j));
    bm.add(norm_quantile(p));
    env.beta[j] = bm.value();
  }
  env.w_series = detail::w_series_from_beta(env.beta, draw.law.std_dev());
  env.k_stat = k_statistic(env);
  return env;
}

namespace detail {

// Quantile of Binomial(n, 1/2) by cumulative scan over a +-12 sd window
// around the mode. The mass outside the window is below 1e-30, which is
// finer than a double-precision uniform can resolve.
inline std::size_t binom_symmetric_quantile(std::size_t n, double u,
                                            const LogFactorialTable& lf) {
  const double mean = 0.5 * static_cast<double>(n);
  const double sd = 0.5 * std::sqrt(static_cast<double>(n));
  const double span = 12.0 * sd + 2.0;
  const std::size_t lo =
      mean > span ? static_cast<std::size_t>(mean - span) : std::size_t{0};
  const std::size_t hi = std::min(n, static_cast<std::size_t>(mean + span));
  const double log2n = static_cast<double>(n) * std::log(2.0);
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = lo; k <= hi; ++k)
    log_max = std::max(log_max, lf.log_choose(n, k) - log2n);
  KahanSum total;
  for (std::size_t k = lo; k <= hi; ++k)
    total.add(std::exp(lf.log_choose(n, k) - log2n - log_max));
  const double target = u * total.value();
  KahanSum cum;
  for (std::size_t k = lo; k <= hi; ++k) {
    cum.add(std::exp(lf.log_choose(n, k) - log2n - log_max));
    if (cum.value() >= target) return k;
  }
  return hi;
}

// Quantile of the left-half +1 count given the block +1 count: over a block
// of 2h Rademacher steps with K pluses in total, the left h steps carry a
// hypergeometric number of pluses. Ties break toward the smaller support
// point (cumulative >= u).
inline std::size_t hypergeom_half_quantile(std::size_t h, std::size_t big_k, double u,
                                           const LogFactorialTable& lf) {
  const std::size_t n = 2 * h;
  const std::size_t j_lo = big_k > h ? big_k - h : std::size_t{0};
  const std::size_t j_hi = std::min(h, big_k);
  if (j_lo == j_hi) return j_lo;  // degenerate conditional (all or nothing)
  const double mean = 0.5 * static_cast<double>(big_k);
  const double var = static_cast<double>(big_k) * static_cast<double>(n - big_k) /
                     (4.0 * static_cast<double>(n - 1));
  const double span = 12.0 * std::sqrt(var) + 2.0;
  const std::size_t lo =
      std::max(j_lo, mean > span ? static_cast<std::size_t>(mean - span) : std::size_t{0});
  const std::size_t hi = std::min(j_hi, static_cast<std::size_t>(mean + span));
  auto log_pmf = [&](std::size_t j) {
    return lf.log_choose(h, j) + lf.log_choose(h, big_k - j);
  };
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = lo; j <= hi; ++j) log_max = std::max(log_max, log_pmf(j));
  KahanSum total;
  for (std::size_t j = lo; j <= hi; ++j) total.add(std::exp(log_pmf(j) - log_max));
  const double target = u * total.value();
  KahanSum cum;
  for (std::size_t j = lo; j <= hi; ++j) {
    cum.add(std::exp(log_pmf(j) - log_max));
    if (cum.value() >= target) return j;
  }
  return hi;
}

struct DyadicScratch {
  std::vector<double> beta;    // index 0..N, beta[0] = 0
  std::vector<double> values;  // U_1..U_N at [0..N-1]
  const LogFactorialTable* lf = nullptr;
  const CounterRng* rng = nullptr;
};

// Refines the block (l, r]: splits the Brownian increment at the midpoint
// with a bridge draw and pushes the block's +1 count down by the exact
// conditional quantile, driven by the same standardized bridge variable.
inline void dyadic_refine(DyadicScratch& s, std::size_t l, std::size_t r,
                          std::size_t plus_count) {
  const std::size_t len = r - l;
  if (len == 1) {
    s.values[l] = plus_count == 1 ? 1.0 : -1.0;
    return;
  }
  const std::size_t mid = l + len / 2;
  const double z = norm_quantile(s.rng->unit_at(mid));
  s.beta[mid] = 0.5 * (s.beta[l] + s.beta[r]) +
                0.5 * std::sqrt(static_cast<double>(len)) * z;
  const double u = norm_cdf(z);
  const std::size_t left_plus =
      hypergeom_half_quantile(len / 2, plus_count, u, *s.lf);
  dyadic_refine(s, l, mid, left_plus);
  dyadic_refine(s, mid, r, plus_count - left_plus);
}

inline CoupledEnvironment couple_kmt_dyadic_with_table(int n_log2, std::uint64_t seed,
                                                       const LogFactorialTable& lf) {
  if (n_log2 < 1) throw std::invalid_argument("couple_kmt_dyadic: N must be a power of two >= 2");
  if (n_log2 > 20) throw std::invalid_argument("couple_kmt_dyadic: N_log2 > 20 exceeds the resource guard");
  const std::size_t n = std::size_t{1} << n_log2;
  CounterRng rng(derive_seed(seed, kDyadicStream));

  DyadicScratch s;
  s.beta.assign(n + 1, 0.0);
  s.values.assign(n, 0.0);
  s.lf = &lf;
  s.rng = &rng;

  // Top level: the endpoint value of the Brownian path fixes the total walk
  // sum through the Binomial quantile of Phi(beta_N / sqrt N).
  const double z_total = norm_quantile(rng.unit_at(n));
  s.beta[n] = std::sqrt(static_cast<double>(n)) * z_total;
  const std::size_t total_plus = binom_symmetric_quantile(n, norm_cdf(z_total), lf);
  dyadic_refine(s, 0, n, total_plus);

  CoupledEnvironment env;
  env.coupler = CouplerKind::DyadicKmt;
  env.draw = EnvironmentDraw{DisorderLaw::rademacher(), seed, std::move(s.values)};
  env.beta.assign(s.beta.begin() + 1, s.beta.end());
  env.w_series = detail::w_series_from_beta(env.beta, 1.0);
  env.k_stat = k_statistic(env);
  return env;
}

}  // namespace detail

// Constructive KMT-type coupling for Rademacher disorder: Brownian values
// at dyadic times by bridge refinement, the walk reconstructed top-down
// from exact conditional quantiles. Both marginals are exact; the coupling
// error stays O(ln N).
inline CoupledEnvironment couple_kmt_dyadic(int n_log2, std::uint64_t seed) {
  if (n_log2 < 1 || n_log2 > 20)
    return detail::couple_kmt_dyadic_with_table(n_log2, seed, LogFactorialTable(2));
  LogFactorialTable lf((std::size_t{1} << n_log2) + 1);
  return detail::couple_kmt_dyadic_with_table(n_log2, seed, lf);
}

// Builds one coupled environment according to `kind`; for ExactGaussian and
// NaiveQuantile the disorder draw comes from sample_environment(law, n, seed),
// for DyadicKmt the walk is reconstructed (law must be Rademacher, n = 2^m).
inline CoupledEnvironment couple_environment(CouplerKind kind, const DisorderLaw& law,
                                             std::size_t n, std::uint64_t seed) {
  switch (kind) {
    case CouplerKind::ExactGaussian:
      return couple_exact_gaussian(sample_environment(law, n, seed));
    case CouplerKind::NaiveQuantile:
      return couple_naive_quantile(sample_environment(law, n, seed),
                                   derive_seed(seed, stream_tag("naive-seed")));
    case CouplerKind::DyadicKmt: {
      if (law.kind() != DisorderKind::Rademacher)
        throw std::invalid_argument("dyadic-kmt coupler requires Rademacher disorder");
      if (n < 2 || (n & (n - 1)) != 0)
        throw std::invalid_argument("dyadic-kmt coupler requires N to be a power of two");
      int n_log2 = 0;
      for (std::size_t v = n; v > 1; v >>= 1) ++n_log2;
      return couple_kmt_dyadic(n_log2, seed);
    }
  }
  throw std::logic_error("couple_environment: unknown coupler");
}

// K samples across independently seeded coupled environments.
inline std::vector<double> sample_k_statistics(CouplerKind kind, const DisorderLaw& law,
                                               std::size_t n, std::size_t replicates,
                                               std::uint64_t seed, int threads = 1) {
  std::vector<double> ks(replicates);
  if (kind == CouplerKind::DyadicKmt) {
    if (law.kind() != DisorderKind::Rademacher)
      throw std::invalid_argument("dyadic-kmt coupler requires Rademacher disorder");
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("dyadic-kmt coupler requires N to be a power of two");
    int n_log2 = 0;
    for (std::size_t v = n; v > 1; v >>= 1) ++n_log2;
    if (n_log2 > 20)
      throw std::invalid_argument("couple_kmt_dyadic: N_log2 > 20 exceeds the resource guard");
    LogFactorialTable lf(n + 1);  // shared read-only across workers
    parallel_for(replicates, threads, [&](std::size_t r) {
      auto env = detail::couple_kmt_dyadic_with_table(
          n_log2, derive_seed(seed, stream_tag("k-replicate"), r), lf);
      ks[r] = env.k_stat;
    });
  } else {
    parallel_for(replicates, threads, [&](std::size_t r) {
      auto env = couple_environment(kind, law, n,
                                    derive_seed(seed, stream_tag("k-replicate"), r));
      ks[r] = env.k_stat;
    });
  }
  return ks;
}

// Empirical tail of K recentered at 2(Gamma_hat + 1), with a log-linear fit
// of the tail over the frequency band [0.01, 0.5].
struct KTailProfile {
  std::vector<double> x_grid;
  std::vector<double> tail_freq;
  double gamma_hat = 0.0;
  double lambda_hat = 0.0;
  double r2 = 0.0;
  bool degenerate = false;
  std::size_t n = 0;
  std::size_t replicates = 0;
};

inline KTailProfile k_tail_profile_from_samples(std::vector<double> ks, std::size_t n) {
  KTailProfile profile;
  profile.n = n;
  profile.replicates = ks.size();
  std::sort(ks.begin(), ks.end());
  const double med = quantile_sorted(ks, 0.5);
  profile.gamma_hat = std::max(0.0, med / 2.0 - 1.0);
  if (ks.back() - ks.front() < 1e-12) {
    profile.degenerate = true;  // e.g. the exact coupler: K identically zero
    return profile;
  }
  const double center = 2.0 * (profile.gamma_hat + 1.0);
  const double total = static_cast<double>(ks.size());
  auto tail_at = [&](double x) {
    auto it = std::upper_bound(ks.begin(), ks.end(), center + x);
    return static_cast<double>(ks.end() - it) / total;
  };
  // x grid anchored at tail levels log-spaced over the fit band; the
  // empirical frequencies are recomputed from counts at those abscissae.
  std::vector<double> log_tail;
  const int points = 20;
  for (int i = 0; i < points; ++i) {
    double level = 0.5 * std::pow(0.02, static_cast<double>(i) / (points - 1));
    double x = quantile_sorted(ks, 1.0 - level) - center;
    if (x < 0.0) continue;
    if (!profile.x_grid.empty() && x <= profile.x_grid.back()) continue;
    double freq = tail_at(x);
    if (freq < 0.01 || freq > 0.5) continue;
    profile.x_grid.push_back(x);
    profile.tail_freq.push_back(freq);
    log_tail.push_back(std::log(freq));
  }
  if (profile.x_grid.size() < 3) {
    profile.degenerate = true;
    return profile;
  }
  OlsFit fit = ols(profile.x_grid, log_tail);
  profile.lambda_hat = -fit.slope;
  profile.r2 = fit.r2;
  return profile;
}

inline KTailProfile k_tail_profile(CouplerKind kind, const DisorderLaw& law,
                                   std::size_t n, std::size_t replicates,
                                   std::uint64_t seed, int threads = 1) {
  if (replicates < 200)
    throw std::invalid_argument("k_tail_profile: need >= 200 replicates");
  return k_tail_profile_from_samples(
      sample_k_statistics(kind, law, n, replicates, seed, threads), n);
}

}  // namespace dmfsim
