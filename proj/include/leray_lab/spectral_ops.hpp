#pragma once

#include "leray_lab/field.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace leray_lab {

namespace detail {

inline void require_vector(const Field& u) {
  if (u.components() != static_cast<std::size_t>(u.grid().dim()))
    throw InvalidArgument("expected an n-component vector field");
}

/// In-place Leray projection of n coefficient arrays.
inline void project_in_place(const Grid& g, std::vector<ComplexArray>& u) {
  const int dim = g.dim();
  const auto& k2 = g.k_squared();
  std::vector<const double*> k(dim);
  for (int a = 0; a < dim; ++a) k[a] = g.wavevector(a).data();
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    if (k2[mode] == 0.0) continue;  // mean flow is already solenoidal
    Complex kdotu{};
    for (int a = 0; a < dim; ++a) kdotu += k[a][mode] * u[a][mode];
    const Complex s = kdotu / k2[mode];
    for (int a = 0; a < dim; ++a) u[a][mode] -= k[a][mode] * s;
  }
}

inline void dealias_in_place(const Grid& g, ComplexArray& c) {
  const auto& keep = g.dealias_mask();
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode)
    if (!keep[mode]) c[mode] = Complex{};
}

inline void heat_in_place(const Grid& g, ComplexArray& c, double nu, double t) {
  const auto& k2 = g.k_squared();
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) c[mode] *= std::exp(-nu * k2[mode] * t);
}

}  // namespace detail

/// Mode-wise I - k k^T/|k|^2; the k = 0 mode is left untouched.
inline Field leray_project(const Field& field) {
  detail::require_vector(field);
  Field s = with_spectral(field);
  std::vector<ComplexArray> u = s.coefficient_arrays();
  detail::project_in_place(s.grid(), u);
  return Field::from_coefficients(s.grid(), std::move(u));
}

/// D_{axes[0]} ... D_{axes[m-1]} applied to every component.
inline Field derivative(const Field& field, std::span<const int> axes) {
  const Grid& g = field.grid();
  if (axes.empty()) throw InvalidArgument("derivative needs at least one axis");
  for (int a : axes)
    if (a < 0 || a >= g.dim())
      throw InvalidArgument("derivative axis " + std::to_string(a) + " out of range");
  Field s = with_spectral(field);
  std::vector<ComplexArray> out = s.coefficient_arrays();
  // i^m
  static constexpr Complex unit_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex phase = unit_powers[axes.size() % 4];
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    double factor = 1.0;
    for (int a : axes) factor *= g.wavevector(a)[mode];
    const Complex mult = phase * factor;
    for (auto& c : out) c[mode] *= mult;
  }
  return Field::from_coefficients(g, std::move(out));
}

inline Field derivative(const Field& field, std::initializer_list<int> axes) {
  return derivative(field, std::span<const int>(axes.begin(), axes.size()));
}

/// e^{nu Delta t}: each coefficient scaled by exp(-nu |k|^2 t).
inline Field heat_semigroup(const Field& field, double nu, double t) {
  if (t < 0.0) throw InvalidArgument("heat semigroup time must be nonnegative");
  if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
  Field s = with_spectral(field);
  std::vector<ComplexArray> out = s.coefficient_arrays();
  for (auto& c : out) detail::heat_in_place(s.grid(), c, nu, t);
  return Field::from_coefficients(s.grid(), std::move(out));
}

/// Zeroes every mode outside the dealiasing cutoff.
inline Field dealias(const Field& field) {
  Field s = with_spectral(field);
  std::vector<ComplexArray> out = s.coefficient_arrays();
  for (auto& c : out) detail::dealias_in_place(s.grid(), c);
  return Field::from_coefficients(s.grid(), std::move(out));
}

/// max_k |k . u(k)| relative to max_k |u(k)|.
inline double divergence_defect(const Field& field) {
  detail::require_vector(field);
  Field s = with_spectral(field);
  const Grid& g = s.grid();
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    Complex d{};
    for (int a = 0; a < g.dim(); ++a) {
      const Complex c = s.coefficients(a)[mode];
      d += g.wavevector(a)[mode] * c;
      scale = std::max(scale, std::abs(c));
    }
    worst = std::max(worst, std::abs(d));
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

/// Evaluates Q = P[(u . grad) u] pseudo-spectrally, reusing scratch buffers
/// between calls. Uses the conservative form div(u (x) u), which equals
/// (u . grad) u for solenoidal u, and applies the dealiasing cutoff to u before
/// the products and to the products afterwards.
class AdvectionOperator {
 public:
  explicit AdvectionOperator(Grid grid) : grid_(std::move(grid)) {
    const int n = grid_.dim();
    velocity_.assign(n, RealArray(grid_.sample_count()));
    product_ = RealArray(grid_.sample_count());
    scratch_ = ComplexArray(grid_.mode_count());
    pair_coeffs_.assign(n * (n + 1) / 2, ComplexArray(grid_.mode_count()));
  }

  const Grid& grid() const { return grid_; }

  /// `u` holds n coefficient arrays; `q` receives n coefficient arrays.
  void apply(const std::vector<ComplexArray>& u, std::vector<ComplexArray>& q) {
    const Grid& g = grid_;
    const int n = g.dim();
    const auto& keep = g.dealias_mask();
    const double scale = 1.0 / static_cast<double>(g.sample_count());
    for (int a = 0; a < n; ++a) {
      for (std::size_t mode = 0; mode < g.mode_count(); ++mode)
        scratch_[mode] = keep[mode] ? u[a][mode] : Complex{};
      g.plans().inverse(scratch_.data(), velocity_[a].data());
    }
    int pair = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j, ++pair) {
        const double* ui = velocity_[i].data();
        const double* uj = velocity_[j].data();
        for (std::size_t p = 0; p < g.sample_count(); ++p) product_[p] = ui[p] * uj[p];
        ComplexArray& out = pair_coeffs_[pair];
        g.plans().forward(product_.data(), out.data());
        for (std::size_t mode = 0; mode < g.mode_count(); ++mode)
          out[mode] = keep[mode] ? out[mode] * scale : Complex{};
      }
    }
    q.resize(n);
    for (int i = 0; i < n; ++i) {
      q[i].assign(g.mode_count(), Complex{});
      for (int j = 0; j < n; ++j) {
        const ComplexArray& pij = pair_coeffs_[pair_index(i, j)];
        const double* kj = g.wavevector(j).data();
        for (std::size_t mode = 0; mode < g.mode_count(); ++mode)
          q[i][mode] += Complex(0.0, kj[mode]) * pij[mode];
      }
    }
    detail::project_in_place(g, q);
  }

 private:
  int pair_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    const int n = grid_.dim();
    return i * n - i * (i - 1) / 2 + (j - i);
  }

  Grid grid_;
  std::vector<RealArray> velocity_;
  RealArray product_;
  ComplexArray scratch_;
  std::vector<ComplexArray> pair_coeffs_;
};

/// Q = P[(u . grad) u] with dealiasing; the pressure-free nonlinearity.
inline Field nonlinear_term(const Field& u) {
  detail::require_vector(u);
  Field s = with_spectral(u);
  AdvectionOperator op(s.grid());
  std::vector<ComplexArray> q;
  op.apply(s.coefficient_arrays(), q);
  return Field::from_coefficients(s.grid(), std::move(q));
}

}  // namespace leray_lab
