#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmfsim/environment.hpp"
#include "dmfsim/model.hpp"
#include "dmfsim/rng.hpp"

namespace dmfsim {

// Deterministic flow of dx/dt = b(x) over dt. Exact for the linear family,
// adaptive 4th-order (step doubling, local error below kFlowTol) for tanh.
inline constexpr double kFlowTol = 1e-10;

namespace detail {

inline double rk4_step(const Drift& b, double x, double h) {
  const double k1 = b(x);
  const double k2 = b(x + 0.5 * h * k1);
  const double k3 = b(x + 0.5 * h * k2);
  const double k4 = b(x + h * k3);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double adaptive_flow(const Drift& b, double x, double dt) {
  double remaining = dt;
  double h = dt;
  while (remaining > 0.0) {
    h = std::min(h, remaining);
    const double coarse = rk4_step(b, x, h);
    const double half = rk4_step(b, x, 0.5 * h);
    const double fine = rk4_step(b, half, 0.5 * h);
    const double err = std::abs(fine - coarse) / 15.0;
    if (err <= kFlowTol || h <= 1e-12) {
      x = fine;
      remaining -= h;
      if (err > 0.0) h *= std::min(4.0, 0.9 * std::pow(kFlowTol / err, 0.2));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(kFlowTol / err, 0.2));
    }
  }
  return x;
}

}  // namespace detail

inline double flow_step(const Drift& drift, double x, double dt) {
  if (dt < 0.0) throw std::invalid_argument("flow_step: dt must be >= 0");
  if (dt == 0.0) return x;
  if (drift.kind() == Drift::Kind::Linear) {
    const double alpha = drift.alpha();
    const double c = drift.c();
    if (alpha == 0.0) return x + c * dt;
    const double decay = std::exp(-alpha * dt);
    return x * decay + c * (-std::expm1(-alpha * dt)) / alpha;
  }
  return detail::adaptive_flow(drift, x, dt);
}

// Raised when a trajectory exceeds the blowup guard. With sublinear
// coefficients this indicates a bug or a deliberately explosive model, so
// the time of blowup is preserved for diagnosis.
class aborted_path_error : public std::runtime_error {
 public:
  explicit aborted_path_error(double t)
      : std::runtime_error("path aborted: nonfinite or oversized state at t=" +
                           std::to_string(t)),
        time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

inline constexpr double kBlowupGuard = 1e12;

struct PdmpEvent {
  double time;
  double pre_state;
  std::uint32_t particle_index;  // 0-based index into the environment draw
  double post_state;
};

// Event list plus the flow descriptor: together they determine the whole
// cadlag trajectory exactly.
struct PdmpPath {
  double t0 = 0.0;
  double x0 = 0.0;
  double horizon = 0.0;
  Drift drift = Drift::linear(0.0, 0.0);
  std::uint64_t seed = 0;
  std::vector<PdmpEvent> events;
};

inline double path_value_at(const PdmpPath& path, double t) {
  if (t < path.t0 || t > path.horizon)
    throw std::out_of_range("path_value_at: t outside [t0, horizon]");
  double base_t = path.t0;
  double base_x = path.x0;
  auto it = std::upper_bound(path.events.begin(), path.events.end(), t,
                             [](double v, const PdmpEvent& e) { return v < e.time; });
  if (it != path.events.begin()) {
    const PdmpEvent& last = *(it - 1);
    base_t = last.time;
    base_x = last.post_state;  // right-continuous at event times
  }
  return flow_step(path.drift, base_x, t - base_t);
}

namespace detail {

inline constexpr std::uint64_t kPdmpStream = stream_tag("pdmp-events");

struct NullObserver {
  void segment(double, double, double, double) {}
  void jump(double, double, std::size_t, double) {}
};

struct EventRecorder {
  std::vector<PdmpEvent>* events;
  void segment(double, double, double, double) {}
  void jump(double t, double pre, std::size_t j, double post) {
    events->push_back({t, pre, static_cast<std::uint32_t>(j), post});
  }
};

}  // namespace detail

// Exact event-driven walk. All N Poisson streams share the intensity
// f(X_t-), so they aggregate into one stream of rate N f with a uniformly
// chosen particle per accepted event: O(events) instead of O(N * events).
// Candidates come from a windowed constant majorant M >= f along the flow
// (Gronwall displacement bound); each candidate is accepted with
// probability f(pre)/M. `majorant_inflation` deliberately loosens M; the
// law of the output must not depend on it (thinning invariance).
//
// Observer contract: segment(t_a, x_a, t_b, x_b) for every flow stretch
// actually taken, then jump(t, pre, j, post) at accepted events.
template <class Observer>
inline double simulate_pdmp_walk(const Drift& drift, const Rate& rate,
                                 std::span<const double> jump_heights, double x0,
                                 double t0, double horizon, CounterRng& rng,
                                 Observer&& obs, double majorant_inflation = 1.0) {
  const std::size_t n = jump_heights.size();
  if (n == 0) throw std::invalid_argument("simulate_pdmp_walk: empty environment");
  const double lip_b = drift.lipschitz();
  const double lip_f = rate.lipschitz();
  double t = t0;
  double x = x0;
  if (!std::isfinite(x) || std::abs(x) > kBlowupGuard) throw aborted_path_error(t);
  while (t < horizon) {
    const double fx = rate(x);
    double window = std::min(0.1, horizon - t);
    const double total_rate_now = static_cast<double>(n) * fx;
    if (total_rate_now > 0.0) window = std::min(window, 8.0 / total_rate_now);
    if (lip_b > 0.0) window = std::min(window, 0.5 / lip_b);
    // |x_s - x| <= |b(x)| s / (1 - L_b s) for L_b s < 1; conservative.
    double disp = std::abs(drift(x)) * window;
    if (lip_b > 0.0) disp /= 1.0 - lip_b * window;
    const double majorant = (fx + lip_f * disp) * majorant_inflation;
    const double t_end = std::min(t + window, horizon);

    double dt_cand = majorant > 0.0
                         ? rng.next_exponential() /
                               (static_cast<double>(n) * majorant)
                         : std::numeric_limits<double>::infinity();
    if (t + dt_cand >= t_end) {
      const double x_new = flow_step(drift, x, t_end - t);
      obs.segment(t, x, t_end, x_new);
      t = t_end;
      x = x_new;
    } else {
      const double t_cand = t + dt_cand;
      const double pre = flow_step(drift, x, dt_cand);
      obs.segment(t, x, t_cand, pre);
      const double f_pre = rate(pre);
      if (f_pre > majorant * (1.0 + 1e-12))
        throw std::logic_error("simulate_pdmp_walk: majorant violated, thinning invalid");
      if (rng.next_unit() * majorant <= f_pre) {
        const std::size_t j = static_cast<std::size_t>(rng.next_index(n));
        const double post = pre + jump_heights[j];
        obs.jump(t_cand, pre, j, post);
        x = post;
      } else {
        x = pre;
      }
      t = t_cand;
    }
    if (!std::isfinite(x) || std::abs(x) > kBlowupGuard) throw aborted_path_error(t);
  }
  return x;
}

inline std::vector<double> jump_heights_from(const EnvironmentDraw& env) {
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(env.size()));
  std::vector<double> jumps(env.size());
  for (std::size_t j = 0; j < env.size(); ++j) jumps[j] = env.values[j] * inv_sqrt_n;
  return jumps;
}

inline PdmpPath simulate_pdmp(const ModelSpec& model, const EnvironmentDraw& env,
                              double x0, std::uint64_t seed) {
  if (!std::isfinite(x0)) throw std::invalid_argument("simulate_pdmp: x0 must be finite");
  PdmpPath path{0.0, x0, model.horizon, model.drift, seed, {}};
  const std::vector<double> jumps = jump_heights_from(env);
  CounterRng rng(derive_seed(seed, detail::kPdmpStream));
  detail::EventRecorder recorder{&path.events};
  simulate_pdmp_walk(model.drift, model.rate, jumps, x0, 0.0, model.horizon, rng,
                     recorder);
  return path;
}

// Streaming observer that records the cadlag state at sorted query times
// and (optionally) the running sup of |X|. The 1-d flow is monotone
// between events, so the sup over a segment is attained at its endpoints.
class MarginalProbe {
 public:
  MarginalProbe(const Drift& drift, std::span<const double> sorted_times,
                bool track_sup = false)
      : drift_(&drift), times_(sorted_times), values_(sorted_times.size(), 0.0),
        track_sup_(track_sup) {}

  void segment(double t_a, double x_a, double t_b, double x_b) {
    while (cursor_ < times_.size() && times_[cursor_] >= t_a && times_[cursor_] < t_b) {
      values_[cursor_] = flow_step(*drift_, x_a, times_[cursor_] - t_a);
      ++cursor_;
    }
    if (track_sup_) sup_abs_ = std::max({sup_abs_, std::abs(x_a), std::abs(x_b)});
  }
  void jump(double, double, std::size_t, double post) {
    if (track_sup_) sup_abs_ = std::max(sup_abs_, std::abs(post));
  }

  // Call once the walk returns; times at the horizon take the final state.
  void finish(double final_state) {
    while (cursor_ < times_.size()) values_[cursor_++] = final_state;
    if (track_sup_) sup_abs_ = std::max(sup_abs_, std::abs(final_state));
  }

  const std::vector<double>& values() const { return values_; }
  double sup_abs() const { return sup_abs_; }

 private:
  const Drift* drift_;
  std::span<const double> times_;
  std::vector<double> values_;
  std::size_t cursor_ = 0;
  bool track_sup_;
  double sup_abs_ = 0.0;
};

// One path, probed at sorted times; avoids storing event lists.
struct ProbeResult {
  std::vector<double> values;
  double sup_abs = 0.0;
};

inline ProbeResult probe_pdmp_path(const ModelSpec& model, const EnvironmentDraw& env,
                                   double x0, std::uint64_t seed,
                                   std::span<const double> sorted_times,
                                   bool track_sup = false) {
  const std::vector<double> jumps = jump_heights_from(env);
  CounterRng rng(derive_seed(seed, detail::kPdmpStream));
  MarginalProbe probe(model.drift, sorted_times, track_sup);
  const double final_state = simulate_pdmp_walk(model.drift, model.rate, jumps, x0,
                                                0.0, model.horizon, rng, probe);
  probe.finish(final_state);
  return ProbeResult{probe.values(), probe.sup_abs()};
}

// Closed-form conditional moments for the driftless constant-rate model:
// given the environment, X_t = x0 + sum_j (U_j/sqrt N) Pois_j(lambda t), so
// mean = x0 + lambda t sqrt(N) (N^{-1} sum U_j) and
// var  = lambda t N^{-1} sum U_j^2.
struct ConditionalMoments {
  double cond_mean = 0.0;
  double cond_var = 0.0;
};

inline ConditionalMoments constant_rate_oracle(const ModelSpec& model,
                                               const EnvironmentDraw& env, double x0,
                                               double t) {
  const bool driftless = model.drift.kind() == Drift::Kind::Linear &&
                         model.drift.alpha() == 0.0 && model.drift.c() == 0.0;
  if (!driftless || model.rate.kind() != Rate::Kind::Constant)
    throw std::invalid_argument(
        "constant_rate_oracle: requires drift Linear(0,0) and a constant rate");
  const double lambda = model.rate.lambda();
  const double n = static_cast<double>(env.size());
  KahanSum s1, s2;
  for (double u : env.values) {
    s1.add(u);
    s2.add(u * u);
  }
  ConditionalMoments m;
  m.cond_mean = x0 + lambda * t * s1.value() / std::sqrt(n);
  m.cond_var = lambda * t * s2.value() / n;
  return m;
}

}  // namespace dmfsim
