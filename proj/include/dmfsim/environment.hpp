#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmfsim/rng.hpp"
#include "dmfsim/stats.hpp"

namespace dmfsim {

// Centered disorder distributions with exponential moments. Four families
// are shipped; each carries its analytic variance and a witness alpha with
// E exp(alpha|U|) finite, so downstream constants stay computable.
enum class DisorderKind { Rademacher, UniformSymmetric, LaplaceCentered, GaussianCentered };

class DisorderLaw {
 public:
  static DisorderLaw rademacher() { return DisorderLaw(DisorderKind::Rademacher, 1.0); }
  static DisorderLaw uniform_symmetric(double half_width) {
    return DisorderLaw(DisorderKind::UniformSymmetric, half_width);
  }
  static DisorderLaw laplace_centered(double scale) {
    return DisorderLaw(DisorderKind::LaplaceCentered, scale);
  }
  static DisorderLaw gaussian_centered(double std_dev) {
    return DisorderLaw(DisorderKind::GaussianCentered, std_dev);
  }

  DisorderKind kind() const { return kind_; }
  double param() const { return param_; }

  double variance() const {
    switch (kind_) {
      case DisorderKind::Rademacher: return 1.0;
      case DisorderKind::UniformSymmetric: return param_ * param_ / 3.0;
      case DisorderKind::LaplaceCentered: return 2.0 * param_ * param_;
      case DisorderKind::GaussianCentered: return param_ * param_;
    }
    return 0.0;
  }
  double std_dev() const { return std::sqrt(variance()); }

  // One valid alpha with E exp(alpha|U|) < infinity (not the supremum).
  double exp_moment_alpha() const {
    switch (kind_) {
      case DisorderKind::Rademacher: return 1.0;
      case DisorderKind::UniformSymmetric: return 1.0 / param_;
      case DisorderKind::LaplaceCentered: return 0.5 / param_;
      case DisorderKind::GaussianCentered: return 1.0 / param_;
    }
    return 1.0;
  }

  double quantile(double u) const {
    switch (kind_) {
      case DisorderKind::Rademacher:
        return u < 0.5 ? -1.0 : 1.0;
      case DisorderKind::UniformSymmetric:
        return param_ * (2.0 * u - 1.0);
      case DisorderKind::LaplaceCentered:
        return u < 0.5 ? param_ * std::log(2.0 * u) : -param_ * std::log(2.0 * (1.0 - u));
      case DisorderKind::GaussianCentered:
        return param_ * norm_quantile(u);
    }
    return 0.0;
  }

  double cdf(double x) const {
    switch (kind_) {
      case DisorderKind::Rademacher:
        if (x < -1.0) return 0.0;
        if (x < 1.0) return 0.5;
        return 1.0;
      case DisorderKind::UniformSymmetric:
        if (x <= -param_) return 0.0;
        if (x >= param_) return 1.0;
        return (x + param_) / (2.0 * param_);
      case DisorderKind::LaplaceCentered:
        return x < 0.0 ? 0.5 * std::exp(x / param_) : 1.0 - 0.5 * std::exp(-x / param_);
      case DisorderKind::GaussianCentered:
        return norm_cdf(x / param_);
    }
    return 0.0;
  }

  // Distributional transform F(x-) + v * P(U = x); maps U (plus an
  // independent uniform v for the atoms) to an exact Uniform(0,1).
  double distributional_transform(double x, double v) const {
    if (kind_ == DisorderKind::Rademacher) {
      return x < 0.0 ? 0.5 * v : 0.5 + 0.5 * v;
    }
    return cdf(x);
  }

  bool operator==(const DisorderLaw& other) const {
    return kind_ == other.kind_ && param_ == other.param_;
  }

 private:
  DisorderLaw(DisorderKind kind, double param) : kind_(kind), param_(param) {
    if (kind != DisorderKind::Rademacher && !(param > 0.0))
      throw std::invalid_argument("disorder law: parameter must be positive");
  }

  DisorderKind kind_;
  double param_;
};

// A frozen environment sample U_1..U_N. Values are generated from a
// counter stream keyed per index, so a draw with the same seed and larger N
// extends the same sequence.
struct EnvironmentDraw {
  DisorderLaw law = DisorderLaw::rademacher();
  std::uint64_t seed = 0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

namespace detail {
inline constexpr std::uint64_t kEnvStream = stream_tag("environment-values");
}

inline EnvironmentDraw sample_environment(const DisorderLaw& law, std::size_t n,
                                          std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_environment: N must be >= 1");
  CounterRng rng(derive_seed(seed, detail::kEnvStream));
  EnvironmentDraw draw{law, seed, {}};
  draw.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) draw.values[j] = law.quantile(rng.unit_at(j));
  return draw;
}

// S_n = n^{-1/2} sum_{j<=n} U_j for every n up to N.
inline std::vector<double> scaled_partial_sums(const EnvironmentDraw& draw) {
  if (draw.values.empty())
    throw std::invalid_argument("scaled_partial_sums: empty draw");
  std::vector<double> out(draw.values.size());
  KahanSum acc;
  for (std::size_t j = 0; j < draw.values.size(); ++j) {
    acc.add(draw.values[j]);
    out[j] = acc.value() / std::sqrt(static_cast<double>(j + 1));
  }
  return out;
}

struct EnvStats {
  double s_n = 0.0;        // N^{-1/2} sum U_j
  double abs3_term = 0.0;  // (1/(N sqrt N)) sum |U_j|^3
  double var_gap = 0.0;    // |N^{-1} sum U_j^2 - sigma^2|
  double abs4_mean = 0.0;  // N^{-1} sum |U_j|^4
  std::optional<double> lil_envelope;  // 2 sqrt(ln ln N), defined for N >= 3
};

inline EnvStats environment_statistics(const EnvironmentDraw& draw) {
  if (draw.values.empty())
    throw std::invalid_argument("environment_statistics: empty draw");
  const double n = static_cast<double>(draw.values.size());
  KahanSum s1, s2, a3, a4;
  for (double u : draw.values) {
    s1.add(u);
    s2.add(u * u);
    a3.add(std::abs(u) * u * u);
    a4.add(u * u * u * u);
  }
  EnvStats stats;
  stats.s_n = s1.value() / std::sqrt(n);
  stats.abs3_term = a3.value() / (n * std::sqrt(n));
  stats.var_gap = std::abs(s2.value() / n - draw.law.variance());
  stats.abs4_mean = a4.value() / n;
  if (draw.values.size() >= 3)
    stats.lil_envelope = 2.0 * std::sqrt(std::log(std::log(n)));
  return stats;
}

// Monte Carlo estimate of E exp(gamma |S_N|). The quantity genuinely
// explodes for small N and large gamma, so terms that would overflow are
// clamped and flagged instead of propagating infinities.
struct ExpMomentEstimate {
  double mean = 0.0;
  double ci = 0.0;  // 1.96 * standard error
  bool saturated = false;
};

inline ExpMomentEstimate exp_moment_estimate(const DisorderLaw& law, double gamma,
                                             std::size_t n, std::size_t replicates,
                                             std::uint64_t seed) {
  if (!(gamma > 0.0)) throw std::invalid_argument("exp_moment_estimate: gamma must be > 0");
  if (replicates < 100)
    throw std::invalid_argument("exp_moment_estimate: need >= 100 replicates");
  constexpr double kMaxExponent = 700.0;  // exp(709.8) overflows a double
  ExpMomentEstimate est;
  std::vector<double> terms(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    CounterRng rng(derive_seed(seed, detail::kEnvStream, static_cast<std::uint64_t>(r)));
    KahanSum acc;
    for (std::size_t j = 0; j < n; ++j) acc.add(law.quantile(rng.unit_at(j)));
    double exponent = gamma * std::abs(acc.value()) / std::sqrt(static_cast<double>(n));
    if (exponent > kMaxExponent) {
      est.saturated = true;
      exponent = kMaxExponent;
    }
    terms[r] = std::exp(exponent);
  }
  est.mean = mean(terms);
  est.ci = 1.96 * std_error_of_mean(terms);
  return est;
}

}  // namespace dmfsim
