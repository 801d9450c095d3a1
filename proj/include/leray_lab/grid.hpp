#pragma once

#include "leray_lab/fftw_support.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace leray_lab {

/// Thrown when a discretization or field argument violates a precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

/// Precomputed per-mode tables for the r2c half-spectrum of one grid.
struct ModeTable {
  // wavevector[axis][mode]; the Nyquist entry of each axis is stored as 0 so
  // that odd derivatives of the (unpaired) Nyquist mode vanish and every
  // spectral operator uses one consistent wavenumber convention.
  std::vector<std::vector<double>> wavevector;
  std::vector<double> k2;
  // Multiplicity of a stored mode in the full spectrum (1 on the k_last = 0
  // and Nyquist planes, 2 elsewhere).
  std::vector<double> weight;
  // Signed integer mode index per axis, range [-N/2, N/2).
  std::vector<std::vector<int>> index;
  std::vector<std::uint8_t> dealias_keep;
  double k_max_retained = 0.0;
};

}  // namespace detail

/// Periodic box [0, L)^n sampled at N points per axis.
class Grid {
 public:
  Grid() = default;

  int dim() const { return dim_; }
  int resolution() const { return resolution_; }
  double box_length() const { return box_length_; }
  double dealias_fraction() const { return dealias_fraction_; }

  /// Spacing of the wavenumber lattice, 2*pi/L.
  double wavenumber_unit() const { return 2.0 * std::numbers::pi / box_length_; }
  double spacing() const { return box_length_ / resolution_; }
  double cell_volume() const { return std::pow(spacing(), dim_); }
  double volume() const { return std::pow(box_length_, dim_); }

  std::size_t sample_count() const { return sample_count_; }
  std::size_t mode_count() const { return mode_count_; }

  /// Largest retained integer mode index per axis after dealiasing.
  int dealias_cutoff() const {
    return static_cast<int>(std::floor(dealias_fraction_ * (resolution_ / 2) + 1e-12));
  }

  const std::vector<double>& wavevector(int axis) const { return modes_->wavevector[axis]; }
  const std::vector<double>& k_squared() const { return modes_->k2; }
  const std::vector<double>& mode_weight() const { return modes_->weight; }
  const std::vector<int>& mode_index(int axis) const { return modes_->index[axis]; }
  const std::vector<std::uint8_t>& dealias_mask() const { return modes_->dealias_keep; }
  double k_max_retained() const { return modes_->k_max_retained; }

  const FftPlans& plans() const { return *plans_; }

  /// Physical coordinate of sample `axis_index` along any axis.
  double coordinate(int axis_index) const { return axis_index * spacing(); }

  /// Integer sample coordinates of flat sample index `flat`.
  std::vector<int> sample_coordinates(std::size_t flat) const {
    std::vector<int> c(dim_);
    for (int a = dim_ - 1; a >= 0; --a) {
      c[a] = static_cast<int>(flat % resolution_);
      flat /= resolution_;
    }
    return c;
  }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && resolution_ == o.resolution_ && box_length_ == o.box_length_ &&
           dealias_fraction_ == o.dealias_fraction_;
  }

 private:
  friend Grid make_grid(int, int, double, double);

  int dim_ = 0;
  int resolution_ = 0;
  double box_length_ = 0.0;
  double dealias_fraction_ = 2.0 / 3.0;
  std::size_t sample_count_ = 0;
  std::size_t mode_count_ = 0;
  std::shared_ptr<const detail::ModeTable> modes_;
  std::shared_ptr<const FftPlans> plans_;
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Builds a periodic grid. dim in {2,3,4}, resolution a power of two >= 8.
inline Grid make_grid(int dim, int resolution, double box_length,
                      double dealias_fraction = 2.0 / 3.0) {
  if (dim < 2 || dim > 4)
    throw InvalidArgument("grid dimension must be 2, 3 or 4, got " + std::to_string(dim));
  if (resolution < 8 || !is_power_of_two(resolution))
    throw InvalidArgument("grid resolution must be a power of two >= 8, got " +
                          std::to_string(resolution));
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw InvalidArgument("box length must be positive");
  if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
    throw InvalidArgument("dealias fraction must lie in (0, 1]");

  Grid g;
  g.dim_ = dim;
  g.resolution_ = resolution;
  g.box_length_ = box_length;
  g.dealias_fraction_ = dealias_fraction;

  const int n = resolution;
  const int half = n / 2 + 1;
  std::size_t samples = 1;
  for (int a = 0; a < dim; ++a) samples *= static_cast<std::size_t>(n);
  const std::size_t modes = samples / n * half;
  g.sample_count_ = samples;
  g.mode_count_ = modes;

  auto table = std::make_shared<detail::ModeTable>();
  table->wavevector.assign(dim, std::vector<double>(modes));
  table->index.assign(dim, std::vector<int>(modes));
  table->k2.resize(modes);
  table->weight.resize(modes);
  table->dealias_keep.resize(modes);

  const double unit = g.wavenumber_unit();
  const int cutoff = g.dealias_cutoff();
  std::vector<int> idx(dim, 0);
  for (std::size_t mode = 0; mode < modes; ++mode) {
    std::size_t rest = mode;
    idx[dim - 1] = static_cast<int>(rest % half);
    rest /= half;
    for (int a = dim - 2; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % n);
      rest /= n;
    }
    double k2 = 0.0;
    bool keep = true;
    for (int a = 0; a < dim; ++a) {
      int m = idx[a];
      if (a < dim - 1 && m >= n / 2) m -= n;
      if (a == dim - 1 && m == n / 2) m = -n / 2;
      const bool nyquist = (m == -n / 2);
      table->index[a][mode] = m;
      const double k = nyquist ? 0.0 : unit * m;
      table->wavevector[a][mode] = k;
      k2 += k * k;
      if (std::abs(m) > cutoff) keep = false;
    }
    table->k2[mode] = k2;
    table->weight[mode] = (idx[dim - 1] == 0 || idx[dim - 1] == n / 2) ? 1.0 : 2.0;
    table->dealias_keep[mode] = keep ? 1 : 0;
    if (keep) table->k_max_retained = std::max(table->k_max_retained, std::sqrt(k2));
  }
  g.modes_ = std::move(table);
  g.plans_ = std::make_shared<const FftPlans>(std::vector<int>(dim, n));
  return g;
}

}  // namespace leray_lab
