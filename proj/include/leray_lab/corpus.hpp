#pragma once

#include "leray_lab/norms.hpp"
#include "leray_lab/radial.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace leray_lab {

using Rng = std::mt19937_64;

/// Scales `u` to unit L^2 norm (zero fields are returned unchanged).
inline Field normalized(const Field& u) {
  Field s = with_spectral(u);
  const double norm = dm_l2_norm(s, 0);
  if (norm == 0.0) return s;
  std::vector<ComplexArray> c = s.coefficient_arrays();
  for (auto& a : c)
    for (auto& v : a) v /= norm;
  return Field::from_coefficients(s.grid(), std::move(c));
}

/// Zeroes every mode with a Nyquist index on some axis. Derivatives treat
/// the Nyquist wavenumber as 0, so such content would carry no gradient.
inline Field strip_nyquist(const Field& u) {
  const Field s = with_spectral(u);
  const Grid& g = s.grid();
  std::vector<ComplexArray> c = s.coefficient_arrays();
  const int half = g.resolution() / 2;
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    bool nyquist = false;
    for (int a = 0; a < g.dim(); ++a) nyquist = nyquist || std::abs(g.mode_index(a)[mode]) == half;
    if (nyquist)
      for (auto& a : c) a[mode] = Complex{};
  }
  return Field::from_coefficients(g, std::move(c));
}

/// Mean-free random field with modes 0 < |m| <= max_mode and spectral amplitude
/// |m|^-slope, normalized to unit L^2 norm.
inline Field random_band_limited_field(const Grid& g, Rng& rng, int max_mode, double slope,
                                       std::size_t components) {
  std::normal_distribution<double> gauss;
  std::vector<ComplexArray> coef(components, ComplexArray(g.mode_count()));
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    double m2 = 0.0;
    bool nyquist = false;
    for (int a = 0; a < g.dim(); ++a) {
      const int m = g.mode_index(a)[mode];
      nyquist = nyquist || m == -g.resolution() / 2;
      m2 += static_cast<double>(m) * m;
    }
    for (std::size_t c = 0; c < components; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      if (m2 == 0.0 || nyquist || m2 > static_cast<double>(max_mode) * max_mode) continue;
      coef[c][mode] = Complex(re, im) * std::pow(m2, -0.5 * slope);
    }
  }
  // A round trip through physical space enforces Hermitian symmetry on the
  // redundant planes of the half spectrum.
  Field raw = with_physical(Field::from_coefficients(g, std::move(coef)));
  return normalized(Field::from_samples(g, raw.sample_arrays()));
}

/// exp(1 - 1/(1 - s^2)) for s < 1, else 0.
inline double smooth_bump(double s) {
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

/// Sum of `count` radial C-infinity bumps with random centres, radii in
/// [min_radius, max_radius] and per-component amplitudes. The radius is capped
/// at L/8 so each support spans at most L/4 per axis.
inline Field random_bump_field(const Grid& g, Rng& rng, int count, double min_radius,
                               double max_radius, std::size_t components) {
  const double cap = g.box_length() / 8.0;
  max_radius = std::min(max_radius, cap);
  min_radius = std::min(min_radius, max_radius);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  struct Bump {
    std::vector<double> centre;
    double radius;
    std::vector<double> amplitude;
  };
  std::vector<Bump> bumps;
  for (int b = 0; b < count; ++b) {
    Bump bump;
    for (int a = 0; a < g.dim(); ++a) bump.centre.push_back(unit(rng) * g.box_length());
    bump.radius = min_radius + (max_radius - min_radius) * unit(rng);
    for (std::size_t c = 0; c < components; ++c) bump.amplitude.push_back(gauss(rng));
    bumps.push_back(std::move(bump));
  }
  const double L = g.box_length();
  Field f = sample_field(g, components, [&](std::span<const double> x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const Bump& b : bumps) {
      double r2 = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        double d = x[a] - b.centre[a];
        d -= L * std::round(d / L);  // minimum image
        r2 += d * d;
      }
      const double v = smooth_bump(std::sqrt(r2) / b.radius);
      if (v == 0.0) continue;
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += b.amplitude[c] * v;
    }
  });
  return normalized(strip_nyquist(f));
}

/// Random mixture of one to three sech^2 / Gaussian profiles on R^n.
inline RadialFunction random_radial_function(int dim, Rng& rng) {
  std::uniform_int_distribution<int> terms(1, 3);
  std::uniform_int_distribution<int> kind(0, 1);
  std::uniform_real_distribution<double> rate(0.3, 3.0);
  std::normal_distribution<double> amp;
  const int n = terms(rng);
  RadialFunction f;
  for (int t = 0; t < n; ++t) {
    const double a = amp(rng);
    const double r = rate(rng);
    RadialFunction g = kind(rng) == 0 ? sech2_profile(dim, a, r) : gaussian_profile(dim, a, r);
    f = t == 0 ? g : f + g;
  }
  return f;
}

}  // namespace leray_lab
