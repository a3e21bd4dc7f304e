#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dmfsim/coupling.hpp"
#include "dmfsim/model.hpp"
#include "dmfsim/pdmp.hpp"
#include "dmfsim/rng.hpp"

namespace dmfsim {

// Euler-Maruyama path of the limit diffusion
//   dX = [b(X) + w f(X)] dt + sigma sqrt(f(X)) dB
// on a uniform grid. Increments are retained so a path replays exactly
// (common-random-numbers contract).
struct DiffusionPath {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> states;               // n_steps + 1 entries
  std::vector<double> brownian_increments;  // n_steps entries
  double w_used = 0.0;
  std::uint64_t seed = 0;

  std::size_t n_steps() const { return brownian_increments.size(); }
};

namespace detail {

inline constexpr std::uint64_t kLimitNoiseStream = stream_tag("limit-brownian");
inline constexpr std::uint64_t kLimitEnvStream = stream_tag("limit-environment");

inline std::size_t grid_steps(double horizon, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("limit sim: dt must be > 0");
  const double steps = horizon / dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps) || rounded < 1.0)
    throw std::invalid_argument("limit sim: horizon must be an integer multiple of dt");
  return static_cast<std::size_t>(rounded);
}

inline double em_step(const ModelSpec& model, double sigma, double w, double x,
                      double dt, double db) {
  const double f = model.rate(x);
  return x + (model.drift(x) + w * f) * dt + sigma * std::sqrt(f) * db;
}

}  // namespace detail

inline DiffusionPath simulate_limit_given_w(const ModelSpec& model, double w, double x0,
                                            double dt, std::uint64_t seed) {
  const std::size_t n_steps = detail::grid_steps(model.horizon, dt);
  const double sigma = model.disorder.std_dev();
  const double sqrt_dt = std::sqrt(dt);
  DiffusionPath path;
  path.dt = dt;
  path.w_used = w;
  path.seed = seed;
  path.states.reserve(n_steps + 1);
  path.brownian_increments.reserve(n_steps);
  CounterRng rng(derive_seed(seed, detail::kLimitNoiseStream));
  double x = x0;
  path.states.push_back(x);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double db = sqrt_dt * norm_quantile(rng.next_unit());
    x = detail::em_step(model, sigma, w, x, dt, db);
    if (!std::isfinite(x) || std::abs(x) > kBlowupGuard)
      throw aborted_path_error(static_cast<double>(k + 1) * dt);
    path.brownian_increments.push_back(db);
    path.states.push_back(x);
  }
  return path;
}

// Annealed version: the Gaussian environment W ~ N(0, sigma^2) is drawn
// from its own substream of `seed`, then the dynamics run as given w.
inline DiffusionPath simulate_annealed(const ModelSpec& model, double x0, double dt,
                                       std::uint64_t seed) {
  CounterRng env_rng(derive_seed(seed, detail::kLimitEnvStream));
  const double w = model.disorder.std_dev() * norm_quantile(env_rng.next_unit());
  return simulate_limit_given_w(model, w, x0, dt, seed);
}

// Streaming marginals at sorted times (must sit on the dt grid within
// rounding); no path storage.
inline std::vector<double> limit_marginals_given_w(const ModelSpec& model, double w,
                                                   double x0, double dt,
                                                   std::span<const double> sorted_times,
                                                   std::uint64_t seed) {
  const std::size_t n_steps = detail::grid_steps(model.horizon, dt);
  const double sigma = model.disorder.std_dev();
  const double sqrt_dt = std::sqrt(dt);
  CounterRng rng(derive_seed(seed, detail::kLimitNoiseStream));
  std::vector<double> out(sorted_times.size(), x0);
  std::size_t cursor = 0;
  while (cursor < sorted_times.size() && sorted_times[cursor] <= 0.0) ++cursor;
  double x = x0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double db = sqrt_dt * norm_quantile(rng.next_unit());
    x = detail::em_step(model, sigma, w, x, dt, db);
    if (!std::isfinite(x) || std::abs(x) > kBlowupGuard)
      throw aborted_path_error(static_cast<double>(k + 1) * dt);
    const double t_k = static_cast<double>(k + 1) * dt;
    while (cursor < sorted_times.size() &&
           sorted_times[cursor] <= t_k * (1.0 + 1e-12)) {
      out[cursor] = x;
      ++cursor;
    }
  }
  while (cursor < sorted_times.size()) out[cursor++] = x;
  return out;
}

// Ensemble against one frozen coupled environment: every path uses the
// single w = W^[N] = sigma beta_N / sqrt(N); the Brownian noise is fresh
// per path (B is independent of the environment).
inline std::vector<DiffusionPath> coupled_limit_ensemble(const ModelSpec& model,
                                                         const CoupledEnvironment& coupled,
                                                         double x0, double dt,
                                                         std::size_t n_paths,
                                                         std::uint64_t seed) {
  if (coupled.w_series.empty())
    throw std::invalid_argument("coupled_limit_ensemble: empty coupled environment");
  const double w = coupled.w_n();
  std::vector<DiffusionPath> paths;
  paths.reserve(n_paths);
  for (std::size_t r = 0; r < n_paths; ++r)
    paths.push_back(simulate_limit_given_w(
        model, w, x0, dt, derive_seed(seed, stream_tag("coupled-path"), r)));
  return paths;
}

// Replays the EM recursion with the stored increments; true by
// construction, used as the bit-exact reconstruction check.
inline bool replay_matches(const ModelSpec& model, const DiffusionPath& path) {
  const double sigma = model.disorder.std_dev();
  double x = path.states.front();
  for (std::size_t k = 0; k < path.n_steps(); ++k) {
    x = detail::em_step(model, sigma, path.w_used, x, path.dt,
                        path.brownian_increments[k]);
    if (x != path.states[k + 1]) return false;
  }
  return true;
}

}  // namespace dmfsim
