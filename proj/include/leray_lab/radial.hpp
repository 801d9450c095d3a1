#pragma once

#include "leray_lab/grid.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace leray_lab {

/// Raised when a radial integral cannot be evaluated to the requested accuracy.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Radial function f(|x|) on R^n, n in {3, 4}, centred at the origin.
///
/// `envelope_amplitude` A and `envelope_rate` c certify the decay
/// |f(r)|, |f'(r)| <= A (1 + r) exp(-c r) for all r >= 0; the quadrature uses
/// it to bound the neglected tail.
struct RadialFunction {
  int dim = 3;
  std::function<double(double)> value;
  std::function<double(double)> slope;
  double envelope_amplitude = 0.0;
  double envelope_rate = 0.0;
  std::string label;
};

/// |S^{n-1}|: 4 pi for n = 3, 2 pi^2 for n = 4.
inline double sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

inline void check_radial_dim(int dim) {
  if (dim != 3 && dim != 4) throw InvalidArgument("radial functions live on R^3 or R^4");
}

/// C sech^2(lambda r), the Gagliardo-Nirenberg extremal family.
inline RadialFunction sech2_profile(int dim, double amplitude, double rate) {
  check_radial_dim(dim);
  if (!(rate > 0.0)) throw InvalidArgument("sech^2 rate must be positive");
  RadialFunction f;
  f.dim = dim;
  f.value = [=](double r) {
    const double s = 1.0 / std::cosh(rate * r);
    return amplitude * s * s;
  };
  f.slope = [=](double r) {
    const double s = 1.0 / std::cosh(rate * r);
    return -2.0 * amplitude * rate * s * s * std::tanh(rate * r);
  };
  // sech^2(x) <= 4 exp(-2x)
  f.envelope_amplitude = 4.0 * std::abs(amplitude) * std::max(1.0, 2.0 * rate);
  f.envelope_rate = 2.0 * rate;
  f.label = "sech2";
  return f;
}

/// C exp(-a r^2).
inline RadialFunction gaussian_profile(int dim, double amplitude, double a) {
  check_radial_dim(dim);
  if (!(a > 0.0)) throw InvalidArgument("gaussian width parameter must be positive");
  RadialFunction f;
  f.dim = dim;
  f.value = [=](double r) { return amplitude * std::exp(-a * r * r); };
  f.slope = [=](double r) { return -2.0 * a * amplitude * r * std::exp(-a * r * r); };
  // a r^2 >= 2 a r - a
  f.envelope_amplitude = std::abs(amplitude) * std::exp(a) * std::max(1.0, 2.0 * a);
  f.envelope_rate = 2.0 * a;
  f.label = "gaussian";
  return f;
}

/// Pointwise sum of two radial functions on the same R^n.
inline RadialFunction operator+(const RadialFunction& f, const RadialFunction& g) {
  if (f.dim != g.dim) throw InvalidArgument("radial sum needs matching dimensions");
  RadialFunction h;
  h.dim = f.dim;
  h.value = [fv = f.value, gv = g.value](double r) { return fv(r) + gv(r); };
  h.slope = [fs = f.slope, gs = g.slope](double r) { return fs(r) + gs(r); };
  h.envelope_amplitude = f.envelope_amplitude + g.envelope_amplitude;
  h.envelope_rate = std::min(f.envelope_rate, g.envelope_rate);
  h.label = f.label + "+" + g.label;
  return h;
}

namespace detail {

/// Composite 30-point Gauss-Legendre on [a, b], doubling the panel count
/// until successive values agree to 1e-13 relative.
template <typename F>
double composite_gauss(F&& integrand, double a, double b) {
  using boost::math::quadrature::gauss;
  auto panels_sum = [&](int panels) {
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) s += gauss<double, 30>::integrate(integrand, a + p * h, a + (p + 1) * h);
    return s;
  };
  int panels = 8;
  double prev = panels_sum(panels);
  for (int level = 0; level < 10; ++level) {
    panels *= 2;
    const double next = panels_sum(panels);
    if (std::abs(next - prev) <= 1e-13 * std::abs(next) || (next == 0.0 && prev == 0.0))
      return next;
    prev = next;
  }
  throw QuadratureError("radial quadrature did not converge under panel doubling");
}

/// Sign changes of g on [0, R], located by a uniform scan and bracketing
/// refinement. |g|^q is not smooth there, so they become panel breakpoints.
inline std::vector<double> sign_changes(const std::function<double(double)>& g, double radius) {
  constexpr int kScan = 4096;
  std::vector<double> roots;
  double a = 0.0;
  double ga = g(a);
  for (int i = 1; i <= kScan; ++i) {
    const double b = radius * i / kScan;
    const double gb = g(b);
    if ((ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0)) {
      std::uintmax_t iters = 200;
      const auto [lo, hi] = boost::math::tools::toms748_solve(
          g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(), iters);
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    ga = gb;
  }
  return roots;
}

/// Upper bound for int_R^inf (A (1+r) e^{-c r})^q r^{n-1} dr, valid for R >= 1.
inline double tail_bound(double amplitude, double rate, double q, int dim, double radius) {
  const double a = q * rate;
  const double p = q + dim;  // (1+r)^q r^{n-1} <= 2^q r^{q+n-1}
  return std::pow(2.0 * amplitude, q) * boost::math::tgamma(p, a * radius) / std::pow(a, p);
}

/// omega_{n-1} int_0^inf |g(r)|^q r^{n-1} dr for g = f or f'.
inline double radial_power_integral(const RadialFunction& f, const std::function<double(double)>& g,
                                    double q) {
  check_radial_dim(f.dim);
  if (!(q >= 1.0)) throw InvalidArgument("Lebesgue exponent must satisfy q >= 1");
  if (f.envelope_amplitude == 0.0) return 0.0;
  if (!(f.envelope_rate > 0.0))
    throw QuadratureError("no decaying envelope: radial integral may diverge");
  const int n = f.dim;
  auto integrand = [&](double r) { return std::pow(std::abs(g(r)), q) * std::pow(r, n - 1); };
  double radius = std::max(1.0, 30.0 / (q * f.envelope_rate));
  for (int attempt = 0; attempt < 40; ++attempt) {
    double body = 0.0;
    double left = 0.0;
    for (double right : sign_changes(g, radius)) {
      body += composite_gauss(integrand, left, right);
      left = right;
    }
    body += composite_gauss(integrand, left, radius);
    const double tail = tail_bound(f.envelope_amplitude, f.envelope_rate, q, n, radius);
    if (tail <= 1e-15 * body || (body == 0.0 && tail < 1e-300)) return sphere_area(n) * body;
    radius *= 1.5;
  }
  throw QuadratureError("radial tail bound never became negligible");
}

}  // namespace detail

/// {omega_{n-1} int_0^inf |f|^q r^{n-1} dr}^{1/q}.
inline double radial_lq_norm(const RadialFunction& f, double q) {
  return std::pow(detail::radial_power_integral(f, f.value, q), 1.0 / q);
}

/// ||D f||_{L^2(R^n)}; for radial f, sum_j |D_j f|^2 = f'(r)^2.
inline double radial_gradient_l2_norm(const RadialFunction& f) {
  return std::sqrt(detail::radial_power_integral(f, f.slope, 2.0));
}

}  // namespace leray_lab
