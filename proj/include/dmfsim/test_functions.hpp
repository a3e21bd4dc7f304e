#pragma once

#include <cmath>
#include <stdexcept>

#include "dmfsim/model.hpp"

namespace dmfsim {

// C^3_b test functions with closed-form derivatives and an exact
// ||g||_{3,inf} = sum_{k<=3} sup|g^{(k)}|. The norm enters theorem-grade
// bounds, so it is computed, never estimated.
class TestFunction {
 public:
  enum class Kind { TanhWave, GaussBump, SinWave };

  static TestFunction tanh_wave(double amp, double k) {
    require_positive(k);
    return TestFunction(Kind::TanhWave, amp, k, 0.0);
  }
  static TestFunction sin_wave(double amp, double k) {
    require_positive(k);
    return TestFunction(Kind::SinWave, amp, k, 0.0);
  }
  static TestFunction gauss_bump(double amp, double center, double width) {
    require_positive(width);
    return TestFunction(Kind::GaussBump, amp, center, width);
  }

  Kind kind() const { return kind_; }
  double amp() const { return p0_; }
  double wavenumber() const { return p1_; }
  double center() const { return p1_; }
  double width() const { return p2_; }

  double operator()(double x) const { return deriv(x, 0); }

  double deriv(double x, int order) const {
    switch (kind_) {
      case Kind::TanhWave:
        return detail::tanh_family_deriv(p0_, p1_, x, order);
      case Kind::SinWave: {
        const double kx = p1_ * x;
        const double kp = std::pow(p1_, order);
        switch (order) {
          case 0: return p0_ * std::sin(kx);
          case 1: return p0_ * kp * std::cos(kx);
          case 2: return -p0_ * kp * std::sin(kx);
          case 3: return -p0_ * kp * std::cos(kx);
        }
        break;
      }
      case Kind::GaussBump: {
        const double z = (x - p1_) / p2_;
        const double e = std::exp(-0.5 * z * z);
        switch (order) {
          case 0: return p0_ * e;
          case 1: return -p0_ / p2_ * z * e;
          case 2: return p0_ / (p2_ * p2_) * (z * z - 1.0) * e;
          case 3: return p0_ / (p2_ * p2_ * p2_) * z * (3.0 - z * z) * e;
        }
        break;
      }
    }
    throw std::invalid_argument("TestFunction::deriv: order in 0..3");
  }

  // ||g||_{3,inf}, exact per family.
  double norm3() const {
    const double a = std::abs(p0_);
    switch (kind_) {
      case Kind::TanhWave: {
        const double k = p1_;
        // sup|g''| = a k^2 * 4/(3 sqrt 3) at tanh = 1/sqrt(3); sup|g'''| = 2 a k^3 at 0.
        return a * (1.0 + k + k * k * (4.0 / (3.0 * std::sqrt(3.0))) + 2.0 * k * k * k);
      }
      case Kind::SinWave: {
        const double k = p1_;
        return a * (1.0 + k + k * k + k * k * k);
      }
      case Kind::GaussBump: {
        const double s = p2_;
        // sup|g'| at z=1; sup|g''| at z=0; sup|g'''| at z^2 = 3 - sqrt(6).
        const double c3 =
            std::sqrt(6.0 * (3.0 - std::sqrt(6.0))) * std::exp(0.5 * (std::sqrt(6.0) - 3.0));
        return a * (1.0 + std::exp(-0.5) / s + 1.0 / (s * s) + c3 / (s * s * s));
      }
    }
    return 0.0;
  }

  bool operator==(const TestFunction& o) const {
    return kind_ == o.kind_ && p0_ == o.p0_ && p1_ == o.p1_ && p2_ == o.p2_;
  }

 private:
  static void require_positive(double v) {
    if (!(v > 0.0)) throw std::invalid_argument("TestFunction: parameter must be > 0");
  }
  TestFunction(Kind kind, double p0, double p1, double p2)
      : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}
  Kind kind_;
  double p0_, p1_, p2_;
};

}  // namespace dmfsim
