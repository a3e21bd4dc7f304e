#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "dmfsim/environment.hpp"
#include "dmfsim/rng.hpp"

namespace dmfsim {

namespace detail {

// Derivatives of t = tanh(kappa x) scaled by `amp`, orders 0..4.
// d/dx tanh = kappa (1 - t^2).
inline double tanh_family_deriv(double amp, double kappa, double x, int order) {
  const double t = std::tanh(kappa * x);
  const double s = 1.0 - t * t;
  switch (order) {
    case 0: return amp * t;
    case 1: return amp * kappa * s;
    case 2: return -2.0 * amp * kappa * kappa * t * s;
    case 3: return -2.0 * amp * kappa * kappa * kappa * s * (1.0 - 3.0 * t * t);
    case 4: {
      const double k4 = kappa * kappa * kappa * kappa;
      return 8.0 * amp * k4 * t * s * (2.0 - 3.0 * t * t);
    }
  }
  throw std::invalid_argument("tanh_family_deriv: order out of range");
}

}  // namespace detail

// Drift families. Linear: b(x) = -alpha x + c (exact flow available).
// Tanh: b(x) = scale * tanh(gain x) (bounded, C^inf, flow integrated
// numerically).
class Drift {
 public:
  enum class Kind { Linear, Tanh };

  static Drift linear(double alpha, double c) { return Drift(Kind::Linear, alpha, c); }
  static Drift tanh_drift(double scale, double gain) {
    if (!(gain > 0.0)) throw std::invalid_argument("tanh drift: gain must be positive");
    return Drift(Kind::Tanh, scale, gain);
  }

  Kind kind() const { return kind_; }
  double alpha() const { return p0_; }
  double c() const { return p1_; }
  double scale() const { return p0_; }
  double gain() const { return p1_; }

  double operator()(double x) const {
    return kind_ == Kind::Linear ? -p0_ * x + p1_ : p0_ * std::tanh(p1_ * x);
  }

  // k-th derivative, k in 1..4.
  double deriv(double x, int order) const {
    if (order < 1 || order > 4) throw std::invalid_argument("drift deriv: order in 1..4");
    if (kind_ == Kind::Linear) return order == 1 ? -p0_ : 0.0;
    return detail::tanh_family_deriv(p0_, p1_, x, order);
  }

  // sup |b'|.
  double lipschitz() const {
    return kind_ == Kind::Linear ? std::abs(p0_) : std::abs(p0_) * p1_;
  }

  bool operator==(const Drift& o) const {
    return kind_ == o.kind_ && p0_ == o.p0_ && p1_ == o.p1_;
  }

 private:
  Drift(Kind kind, double p0, double p1) : kind_(kind), p0_(p0), p1_(p1) {}
  Kind kind_;
  double p0_, p1_;
};

// Jump-rate families. Constant: f = lambda >= 0. Tanh: f(x) = f0 +
// f1 (1 + tanh(kappa x)) / 2 with f0 > 0, so sqrt(f) stays C^4.
class Rate {
 public:
  enum class Kind { Constant, Tanh };

  static Rate constant(double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("constant rate: lambda must be >= 0");
    return Rate(Kind::Constant, lambda, 0.0, 0.0);
  }
  static Rate tanh_rate(double f0, double f1, double kappa) {
    if (!(f0 > 0.0))
      throw std::invalid_argument(
          "tanh rate: f0 must be > 0 (sqrt(f) must stay smooth)");
    if (f1 < 0.0) throw std::invalid_argument("tanh rate: f1 must be >= 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("tanh rate: kappa must be > 0");
    return Rate(Kind::Tanh, f0, f1, kappa);
  }

  Kind kind() const { return kind_; }
  double lambda() const { return p0_; }
  double f0() const { return p0_; }
  double f1() const { return p1_; }
  double kappa() const { return p2_; }

  double operator()(double x) const {
    if (kind_ == Kind::Constant) return p0_;
    return p0_ + 0.5 * p1_ * (1.0 + std::tanh(p2_ * x));
  }

  double deriv(double x, int order) const {
    if (order < 1 || order > 4) throw std::invalid_argument("rate deriv: order in 1..4");
    if (kind_ == Kind::Constant) return 0.0;
    return detail::tanh_family_deriv(0.5 * p1_, p2_, x, order);
  }

  // (sqrt f)^{(k)}, k in 0..4, by exact composition with the f-derivatives.
  double sqrt_deriv(double x, int order) const {
    const double f = (*this)(x);
    const double r = std::sqrt(f);
    if (order == 0) return r;
    if (kind_ == Kind::Constant) return 0.0;
    const double d1 = deriv(x, 1);
    if (order == 1) return d1 / (2.0 * r);
    const double d2 = deriv(x, 2);
    const double f32 = f * r;
    if (order == 2) return d2 / (2.0 * r) - d1 * d1 / (4.0 * f32);
    const double d3 = deriv(x, 3);
    const double f52 = f * f32;
    if (order == 3)
      return d3 / (2.0 * r) - 0.75 * d1 * d2 / f32 + 0.375 * d1 * d1 * d1 / f52;
    const double d4 = deriv(x, 4);
    const double f72 = f * f52;
    if (order == 4)
      return d4 / (2.0 * r) - d1 * d3 / f32 - 0.75 * d2 * d2 / f32 +
             2.25 * d1 * d1 * d2 / f52 - 0.9375 * d1 * d1 * d1 * d1 / f72;
    throw std::invalid_argument("rate sqrt_deriv: order in 0..4");
  }

  // sup |f'|.
  double lipschitz() const {
    return kind_ == Kind::Constant ? 0.0 : 0.5 * p1_ * p2_;
  }
  double min_value() const { return kind_ == Kind::Constant ? p0_ : p0_; }
  double max_value() const { return kind_ == Kind::Constant ? p0_ : p0_ + p1_; }

  bool operator==(const Rate& o) const {
    return kind_ == o.kind_ && p0_ == o.p0_ && p1_ == o.p1_ && p2_ == o.p2_;
  }

 private:
  Rate(Kind kind, double p0, double p1, double p2)
      : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}
  Kind kind_;
  double p0_, p1_, p2_;
};

// Initial conditions with all moments finite. PerturbedDirac places the
// particle system at x0 + eps N^{-exponent}, so the initial KR distance to
// Dirac(x0) is exactly eps N^{-exponent}.
class InitialLaw {
 public:
  enum class Kind { Dirac, Gaussian, PerturbedDirac };

  static InitialLaw dirac(double x0) { return InitialLaw(Kind::Dirac, x0, 0.0, 0.0); }
  static InitialLaw gaussian(double mean, double sd) {
    if (!(sd > 0.0)) throw std::invalid_argument("gaussian init: sd must be > 0");
    return InitialLaw(Kind::Gaussian, mean, sd, 0.0);
  }
  static InitialLaw perturbed_dirac(double x0, double eps, double exponent) {
    if (!(exponent > 0.0))
      throw std::invalid_argument("perturbed dirac init: exponent must be > 0");
    return InitialLaw(Kind::PerturbedDirac, x0, eps, exponent);
  }

  Kind kind() const { return kind_; }
  double x0() const { return p0_; }
  double mean() const { return p0_; }
  double sd() const { return p1_; }
  double eps() const { return p1_; }
  double exponent() const { return p2_; }

  double sample(CounterRng& rng, std::size_t n_particles) const {
    switch (kind_) {
      case Kind::Dirac: return p0_;
      case Kind::Gaussian: return p0_ + p1_ * norm_quantile(rng.next_unit());
      case Kind::PerturbedDirac:
        return p0_ + p1_ * std::pow(static_cast<double>(n_particles), -p2_);
    }
    return p0_;
  }

  double location(std::size_t n_particles) const {
    if (kind_ == Kind::PerturbedDirac)
      return p0_ + p1_ * std::pow(static_cast<double>(n_particles), -p2_);
    return p0_;
  }

  bool operator==(const InitialLaw& o) const {
    return kind_ == o.kind_ && p0_ == o.p0_ && p1_ == o.p1_ && p2_ == o.p2_;
  }

 private:
  InitialLaw(Kind kind, double p0, double p1, double p2)
      : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}
  Kind kind_;
  double p0_, p1_, p2_;
};

// Closed-form Kantorovich-Rubinstein distance between initial laws (1-d
// W1 via quantile coupling; E|d + cZ| is a folded normal mean).
inline double kr_initial_distance(const InitialLaw& a, const InitialLaw& b,
                                  std::size_t n_particles) {
  auto loc = [&](const InitialLaw& l) { return l.location(n_particles); };
  const bool a_point = a.kind() != InitialLaw::Kind::Gaussian;
  const bool b_point = b.kind() != InitialLaw::Kind::Gaussian;
  const double d = loc(a) - loc(b);
  const double c = (a_point ? 0.0 : a.sd()) - (b_point ? 0.0 : b.sd());
  if (c == 0.0) return std::abs(d);
  const double ratio = d / c;
  return std::abs(c) * std::sqrt(2.0 / M_PI) * std::exp(-0.5 * ratio * ratio) +
         std::abs(d) * (1.0 - 2.0 * norm_cdf(-std::abs(ratio)));
}

struct ModelSpec {
  Drift drift = Drift::linear(1.0, 0.0);
  Rate rate = Rate::tanh_rate(1.0, 1.0, 1.0);
  DisorderLaw disorder = DisorderLaw::rademacher();
  InitialLaw init_particle = InitialLaw::dirac(0.0);
  InitialLaw init_limit = InitialLaw::dirac(0.0);
  double horizon = 1.0;
};

}  // namespace dmfsim
