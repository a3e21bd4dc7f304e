#pragma once

// Test-only oracles, independent of the library implementation paths they
// check: quadrature, finite differences, small enumerations.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson_impl(const std::function<double(double)>& f, double a,
                                    double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson(f, a, m);
  const double right = simpson(f, m, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_impl(f, a, m, left, tol / 2.0, depth - 1) +
         adaptive_simpson_impl(f, m, b, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  return adaptive_simpson_impl(f, a, b, simpson(f, a, b), tol, 48);
}

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

// E exp(gamma |Z|) for Z ~ N(0,1), by quadrature.
inline double folded_exp_moment(double gamma) {
  return integrate([gamma](double z) { return 2.0 * std::exp(gamma * z) * normal_pdf(z); },
                   0.0, 45.0, 1e-13);
}

// Central difference of given order with Richardson extrapolation; the
// plain stencils are O(h^2), two extrapolation levels push them to O(h^6).
inline double central_diff(const std::function<double(double)>& f, double x, int order,
                           double h) {
  switch (order) {
    case 1: return (f(x + h) - f(x - h)) / (2.0 * h);
    case 2: return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    case 3:
      return (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) /
             (2.0 * h * h * h);
    case 4:
      return (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) +
              f(x - 2.0 * h)) /
             (h * h * h * h);
  }
  throw std::invalid_argument("central_diff: order in 1..4");
}

inline double fd_derivative(const std::function<double(double)>& f, double x, int order) {
  const double h0 = order <= 2 ? 1e-2 : 5e-2;
  // Richardson triangle on h, h/2, h/4.
  double d1 = central_diff(f, x, order, h0);
  double d2 = central_diff(f, x, order, h0 / 2.0);
  double d3 = central_diff(f, x, order, h0 / 4.0);
  const double r1 = (4.0 * d2 - d1) / 3.0;
  const double r2 = (4.0 * d3 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracles
