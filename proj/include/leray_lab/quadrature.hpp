#pragma once

#include "leray_lab/grid.hpp"

#include <algorithm>
#include <span>
#include <vector>

namespace leray_lab {

enum class QuadratureRule { trapezoid, simpson };

namespace detail {

/// Weights of int_a^b p(t) dt for the polynomial p interpolating at `nodes`
/// (at most four). The Lagrange basis is integrated by 3-point Gauss-Legendre,
/// exact up to degree 5.
inline std::vector<double> interpolatory_weights(std::span<const double> nodes, double a, double b) {
  if (nodes.empty() || nodes.size() > 4) throw InvalidArgument("need one to four nodes");
  static constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<double> w(nodes.size(), 0.0);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int q = 0; q < 3; ++q) {
    const double x = mid + half * gx[q];
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      double l = 1.0;
      for (std::size_t k = 0; k < nodes.size(); ++k)
        if (k != j) l *= (x - nodes[k]) / (nodes[j] - nodes[k]);
      w[j] += half * gw[q] * l;
    }
  }
  return w;
}

/// int_{t0}^{t1} of the interpolant through the first min(4, size) nodes.
inline double first_interval_integral(std::span<const double> t, std::span<const double> f) {
  const std::size_t k = std::min<std::size_t>(4, std::min(t.size(), f.size()));
  if (k < 2) throw InvalidArgument("need at least two nodes");
  const auto w = interpolatory_weights(t.first(k), t[0], t[1]);
  double s = 0.0;
  for (std::size_t j = 0; j < k; ++j) s += w[j] * f[j];
  return s;
}

}  // namespace detail

/// Weights w_i with int f dt ~ sum_i w_i f(t_i) on strictly increasing,
/// possibly nonuniform nodes. Simpson pairs consecutive intervals; with an odd
/// interval count the last three intervals use the cubic through their four
/// nodes (the 3/8 rule on uniform nodes). Two nodes fall back to the
/// trapezoid; one node integrates to zero.
inline std::vector<double> quadrature_weights(std::span<const double> t,
                                              QuadratureRule rule = QuadratureRule::simpson) {
  const std::size_t n = t.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    if (!(t[i] > t[i - 1])) throw InvalidArgument("quadrature nodes must be strictly increasing");
  if (n < 2) return w;
  if (rule == QuadratureRule::trapezoid || n == 2) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = t[i + 1] - t[i];
      w[i] += 0.5 * h;
      w[i + 1] += 0.5 * h;
    }
    return w;
  }
  const std::size_t intervals = n - 1;
  const std::size_t paired = intervals % 2 == 0 ? intervals : intervals - 3;
  for (std::size_t i = 0; i < paired; i += 2) {
    const double h0 = t[i + 1] - t[i];
    const double h1 = t[i + 2] - t[i + 1];
    const double s = (h0 + h1) / 6.0;
    w[i] += s * (2.0 - h1 / h0);
    w[i + 1] += s * (h0 + h1) * (h0 + h1) / (h0 * h1);
    w[i + 2] += s * (2.0 - h0 / h1);
  }
  if (intervals % 2 == 1) {
    const auto tail = t.subspan(n - 4);
    const auto c = detail::interpolatory_weights(tail, tail.front(), tail.back());
    for (std::size_t j = 0; j < 4; ++j) w[n - 4 + j] += c[j];
  }
  return w;
}

/// int f dt over the node span from sampled values.
inline double integrate_samples(std::span<const double> t, std::span<const double> f,
                                QuadratureRule rule = QuadratureRule::simpson) {
  if (t.size() != f.size()) throw InvalidArgument("quadrature nodes and values differ in length");
  const std::vector<double> w = quadrature_weights(t, rule);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i];
  return s;
}

}  // namespace leray_lab
