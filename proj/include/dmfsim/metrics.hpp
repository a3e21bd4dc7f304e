#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dmfsim/stats.hpp"
#include "dmfsim/test_functions.hpp"

namespace dmfsim {

// Empirical 1-d Kantorovich-Rubinstein distance between equal-size samples:
// sort both, mean absolute difference of order statistics.
inline double w1_empirical(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("w1_empirical: samples must be nonempty and equal-size");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  KahanSum acc;
  for (std::size_t i = 0; i < xs.size(); ++i) acc.add(std::abs(xs[i] - ys[i]));
  return acc.value() / static_cast<double>(xs.size());
}

// Row-major matrix of path marginals: n_paths rows, one column per probe
// time. `sup_abs` optionally carries the per-path running sup of |X|.
struct MarginalSample {
  std::vector<double> times;
  std::size_t n_paths = 0;
  std::vector<double> data;
  std::vector<double> sup_abs;

  double at(std::size_t path, std::size_t col) const {
    return data[path * times.size() + col];
  }
  std::vector<double> column(std::size_t col) const {
    std::vector<double> out(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) out[i] = at(i, col);
    return out;
  }
  std::size_t column_of(double t) const {
    for (std::size_t c = 0; c < times.size(); ++c)
      if (std::abs(times[c] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return c;
    throw std::invalid_argument("MarginalSample: no column at requested time");
  }
};

// |E Prod_i g_i(X_{t_i}) - E Prod_i g_i(Y_{t_i})| with its standard error.
// A single test function is recycled across all columns.
struct FidiGap {
  double gap = 0.0;
  double se = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
};

inline std::vector<double> fidi_products(const MarginalSample& sample,
                                         std::span<const TestFunction> gs) {
  const std::size_t k = sample.times.size();
  if (k == 0) throw std::invalid_argument("fidi_products: no probe times");
  if (gs.size() != 1 && gs.size() != k)
    throw std::invalid_argument("fidi_products: need 1 or k test functions");
  std::vector<double> out(sample.n_paths);
  for (std::size_t i = 0; i < sample.n_paths; ++i) {
    double prod = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
      const TestFunction& g = gs.size() == 1 ? gs[0] : gs[c];
      prod *= g(sample.at(i, c));
    }
    out[i] = prod;
  }
  return out;
}

inline FidiGap fidi_gap(const MarginalSample& a, const MarginalSample& b,
                        std::span<const TestFunction> gs) {
  if (a.times.size() != b.times.size())
    throw std::invalid_argument("fidi_gap: probe-time mismatch");
  const std::vector<double> pa = fidi_products(a, gs);
  const std::vector<double> pb = fidi_products(b, gs);
  FidiGap out;
  out.mean_a = mean(pa);
  out.mean_b = mean(pb);
  out.gap = std::abs(out.mean_a - out.mean_b);
  out.se = std::sqrt(variance(pa) / static_cast<double>(pa.size()) +
                     variance(pb) / static_cast<double>(pb.size()));
  return out;
}

// Monte Carlo mean of (X_s - X_r)^2 (X_t - X_s)^2, the moment entering the
// tightness criterion.
inline double tightness_stat(const MarginalSample& sample, double r, double s, double t) {
  if (!(r <= s && s <= t)) throw std::invalid_argument("tightness_stat: need r <= s <= t");
  const std::size_t cr = sample.column_of(r);
  const std::size_t cs = sample.column_of(s);
  const std::size_t ct = sample.column_of(t);
  KahanSum acc;
  for (std::size_t i = 0; i < sample.n_paths; ++i) {
    const double d1 = sample.at(i, cs) - sample.at(i, cr);
    const double d2 = sample.at(i, ct) - sample.at(i, cs);
    acc.add(d1 * d1 * d2 * d2);
  }
  return acc.value() / static_cast<double>(sample.n_paths);
}

// E[(X_t)^{2p}] along the probe grid plus E[sup_{t<=T} |X_t|^kappa] from the
// per-path running sup.
struct MomentProfile {
  std::vector<double> even_moments;
  double sup_moment = 0.0;
};

inline MomentProfile moment_profile(const MarginalSample& sample, int p, int kappa = 2) {
  if (p < 1) throw std::invalid_argument("moment_profile: p >= 1");
  MomentProfile out;
  out.even_moments.resize(sample.times.size(), 0.0);
  for (std::size_t c = 0; c < sample.times.size(); ++c) {
    KahanSum acc;
    for (std::size_t i = 0; i < sample.n_paths; ++i)
      acc.add(std::pow(sample.at(i, c), 2 * p));
    out.even_moments[c] = acc.value() / static_cast<double>(sample.n_paths);
  }
  if (!sample.sup_abs.empty()) {
    KahanSum acc;
    for (double m : sample.sup_abs) acc.add(std::pow(m, kappa));
    out.sup_moment = acc.value() / static_cast<double>(sample.sup_abs.size());
  }
  return out;
}

// Fit of gap(N) against the theoretical regressor ln N / sqrt N (weighted
// least squares through the origin) plus an unconstrained log-log slope.
struct RateFit {
  double c_hat = 0.0;
  double loglog_slope = 0.0;
  double r2 = 0.0;
  std::vector<double> residuals;
  bool degenerate = false;
};

inline RateFit rate_fit(std::span<const double> n_values, std::span<const double> gaps,
                        std::span<const double> ses) {
  if (n_values.size() != gaps.size() || n_values.size() != ses.size())
    throw std::invalid_argument("rate_fit: size mismatch");
  if (n_values.size() < 3) throw std::invalid_argument("rate_fit: need >= 3 N values");
  RateFit fit;
  std::vector<double> regressor(n_values.size());
  std::vector<double> weights(n_values.size());
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    regressor[i] = std::log(n_values[i]) / std::sqrt(n_values[i]);
    weights[i] = ses[i] > 0.0 ? 1.0 / (ses[i] * ses[i]) : 1.0;
  }
  fit.c_hat = wls_through_origin(regressor, gaps, weights);
  fit.residuals.resize(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i)
    fit.residuals[i] = gaps[i] - fit.c_hat * regressor[i];

  std::vector<double> log_n, log_gap;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] > 0.0) {
      log_n.push_back(std::log(n_values[i]));
      log_gap.push_back(std::log(gaps[i]));
    }
  }
  if (log_n.size() < 2) {
    fit.degenerate = true;  // gaps nonpositive throughout
    return fit;
  }
  OlsFit ols_fit = ols(log_n, log_gap);
  fit.loglog_slope = ols_fit.slope;
  fit.r2 = ols_fit.r2;
  return fit;
}

}  // namespace dmfsim
