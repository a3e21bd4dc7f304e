#pragma once

#include <cmath>
#include <stdexcept>

#include "dmfsim/coupling.hpp"
#include "dmfsim/environment.hpp"
#include "dmfsim/model.hpp"
#include "dmfsim/test_functions.hpp"

namespace dmfsim {

// Conditional generator of the N-particle process applied to g:
//   A g(x) = b(x) g'(x) + f(x) sum_j [g(x + U_j / sqrt N) - g(x)].
// Summation order is fixed (index-ascending) and compensated.
inline double gen_pdmp_apply(const TestFunction& g, double x, const EnvironmentDraw& env,
                             const Drift& drift, const Rate& rate) {
  if (env.values.empty()) throw std::invalid_argument("gen_pdmp_apply: empty environment");
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(env.size()));
  const double gx = g(x);
  KahanSum sum;
  for (std::size_t j = 0; j < env.size(); ++j)
    sum.add(g(x + env.values[j] * inv_sqrt_n) - gx);
  return drift(x) * g.deriv(x, 1) + rate(x) * sum.value();
}

// Conditional generator of the limit diffusion in environment w:
//   A g(x) = b g' + w f g' + (1/2) sigma^2 f g''.
inline double gen_limit_apply(const TestFunction& g, double x, double w, double sigma2,
                              const Drift& drift, const Rate& rate) {
  const double f = rate(x);
  return drift(x) * g.deriv(x, 1) + w * f * g.deriv(x, 1) +
         0.5 * sigma2 * f * g.deriv(x, 2);
}

// Deterministic generator-gap inequality: with w = W^[N] from the coupled
// environment,
//   |A^N g - Abar^N g| <= f(x) ||g||_{3,inf} (abs3/6 + K ln N / sqrt N + var_gap/2).
// The inequality is a theorem given the inputs, so any violation beyond
// float rounding is treated as an implementation bug.
struct GapBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  EnvStats stats;
  double k_stat = 0.0;
  double norm3 = 0.0;
  double f_x = 0.0;
  double w_n = 0.0;
};

inline GapBoundReport generator_gap_bound(const TestFunction& g, double x,
                                          const EnvironmentDraw& env,
                                          const CoupledEnvironment& coupled,
                                          const Drift& drift, const Rate& rate) {
  if (coupled.draw.values != env.values)
    throw std::invalid_argument("generator_gap_bound: coupled environment does not match draw");
  const double n = static_cast<double>(env.size());
  GapBoundReport report;
  report.stats = environment_statistics(env);
  report.k_stat = coupled.k_stat;
  report.norm3 = g.norm3();
  report.f_x = rate(x);
  report.w_n = coupled.w_n();
  const double lhs_pdmp = gen_pdmp_apply(g, x, env, drift, rate);
  const double lhs_limit =
      gen_limit_apply(g, x, report.w_n, env.law.variance(), drift, rate);
  report.lhs = std::abs(lhs_pdmp - lhs_limit);
  const double k_term = env.size() >= 2
                            ? report.k_stat * std::log(n) / std::sqrt(n)
                            : 0.0;
  report.rhs = report.f_x * report.norm3 *
               (report.stats.abs3_term / 6.0 + k_term + 0.5 * report.stats.var_gap);
  if (report.lhs > report.rhs * (1.0 + 1e-9) + 1e-13)
    throw std::logic_error("generator_gap_bound: inequality violated (implementation bug)");
  return report;
}

}  // namespace dmfsim
