#pragma once

#include "leray_lab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace leray_lab {

enum class Representation { physical, spectral, both };
enum class Direction { forward, inverse };

/// A real-valued field with `components` scalar components on a periodic
/// grid, held in physical samples, Fourier coefficients, or both.
///
/// Spectral coefficients use the r2c half-spectrum layout and are normalized
/// as Fourier-series coefficients: u(x) = sum_k c_k exp(i k.x).
/// Mutable access to one representation drops the other so the pair can never
/// go stale.
class Field {
 public:
  Field() = default;

  /// Zero field holding the requested representation(s).
  Field(Grid grid, std::size_t components, Representation rep = Representation::both)
      : grid_(std::move(grid)) {
    if (rep != Representation::spectral)
      physical_.assign(components, RealArray(grid_.sample_count(), 0.0));
    if (rep != Representation::physical)
      spectral_.assign(components, ComplexArray(grid_.mode_count(), Complex{}));
  }

  static Field from_samples(Grid grid, std::vector<RealArray> samples) {
    for (const auto& s : samples)
      if (s.size() != grid.sample_count())
        throw InvalidArgument("sample array size does not match grid");
    Field f;
    f.grid_ = std::move(grid);
    f.physical_ = std::move(samples);
    return f;
  }

  static Field from_coefficients(Grid grid, std::vector<ComplexArray> coefficients) {
    for (const auto& c : coefficients)
      if (c.size() != grid.mode_count())
        throw InvalidArgument("coefficient array size does not match grid");
    Field f;
    f.grid_ = std::move(grid);
    f.spectral_ = std::move(coefficients);
    return f;
  }

  /// Both representations; the caller guarantees they are transform pairs.
  static Field from_pair(Grid grid, std::vector<RealArray> samples,
                         std::vector<ComplexArray> coefficients) {
    Field f = from_samples(grid, std::move(samples));
    Field s = from_coefficients(std::move(grid), std::move(coefficients));
    if (f.physical_.size() != s.spectral_.size())
      throw InvalidArgument("representation component counts differ");
    f.spectral_ = std::move(s.spectral_);
    return f;
  }

  const Grid& grid() const { return grid_; }
  std::size_t components() const {
    return has_physical() ? physical_.size() : spectral_.size();
  }
  bool has_physical() const { return !physical_.empty(); }
  bool has_spectral() const { return !spectral_.empty(); }

  std::span<const double> samples(std::size_t c) const {
    require(has_physical(), "field has no physical representation");
    return physical_.at(c);
  }
  std::span<const Complex> coefficients(std::size_t c) const {
    require(has_spectral(), "field has no spectral representation");
    return spectral_.at(c);
  }

  std::span<double> mutable_samples(std::size_t c) {
    require(has_physical(), "field has no physical representation");
    spectral_.clear();
    return physical_.at(c);
  }
  std::span<Complex> mutable_coefficients(std::size_t c) {
    require(has_spectral(), "field has no spectral representation");
    physical_.clear();
    return spectral_.at(c);
  }

  const std::vector<RealArray>& sample_arrays() const { return physical_; }
  const std::vector<ComplexArray>& coefficient_arrays() const { return spectral_; }

 private:
  static void require(bool ok, const char* what) {
    if (!ok) throw InvalidArgument(what);
  }

  Grid grid_;
  std::vector<RealArray> physical_;
  std::vector<ComplexArray> spectral_;
};

using VectorField = Field;
using ScalarField = Field;

namespace detail {

/// Normalized forward transform of one component.
inline ComplexArray forward_component(const Grid& g, std::span<const double> in) {
  RealArray scratch(in.begin(), in.end());
  ComplexArray out(g.mode_count());
  g.plans().forward(scratch.data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.sample_count());
  for (auto& c : out) c *= scale;
  return out;
}

inline RealArray inverse_component(const Grid& g, std::span<const Complex> in) {
  ComplexArray scratch(in.begin(), in.end());
  RealArray out(g.sample_count());
  g.plans().inverse(scratch.data(), out.data());
  return out;
}

}  // namespace detail

/// Populates the other representation. `forward` needs physical samples,
/// `inverse` needs spectral coefficients; the result carries both.
inline Field transform(const Field& field, Direction direction) {
  const Grid& g = field.grid();
  const std::size_t nc = field.components();
  std::vector<RealArray> phys;
  std::vector<ComplexArray> spec;
  if (direction == Direction::forward) {
    if (!field.has_physical()) throw InvalidArgument("forward transform needs physical samples");
    phys = field.sample_arrays();
    for (std::size_t c = 0; c < nc; ++c) spec.push_back(detail::forward_component(g, phys[c]));
  } else {
    if (!field.has_spectral()) throw InvalidArgument("inverse transform needs coefficients");
    spec = field.coefficient_arrays();
    for (std::size_t c = 0; c < nc; ++c) phys.push_back(detail::inverse_component(g, spec[c]));
  }
  return Field::from_pair(g, std::move(phys), std::move(spec));
}

inline Field with_spectral(const Field& f) {
  return f.has_spectral() ? f : transform(f, Direction::forward);
}

inline Field with_physical(const Field& f) {
  return f.has_physical() ? f : transform(f, Direction::inverse);
}

/// Samples `fn(x, out)` at every grid point; `x` holds the n coordinates and
/// `out` receives `components` values.
template <typename Fn>
Field sample_field(const Grid& g, std::size_t components, Fn&& fn) {
  std::vector<RealArray> data(components, RealArray(g.sample_count()));
  std::vector<double> x(g.dim());
  std::vector<double> values(components);
  for (std::size_t p = 0; p < g.sample_count(); ++p) {
    std::size_t rest = p;
    for (int a = g.dim() - 1; a >= 0; --a) {
      x[a] = g.coordinate(static_cast<int>(rest % g.resolution()));
      rest /= g.resolution();
    }
    fn(std::span<const double>(x), std::span<double>(values));
    for (std::size_t c = 0; c < components; ++c) data[c][p] = values[c];
  }
  return Field::from_samples(g, std::move(data));
}

/// Hermitian-symmetry defect of the redundant k_last = 0 and Nyquist planes,
/// relative to the largest coefficient magnitude. Zero for any field whose
/// coefficients came from real samples.
inline double conjugate_symmetry_defect(const Field& f) {
  const Grid& g = f.grid();
  const int n = g.resolution();
  const int half = n / 2 + 1;
  const int dim = g.dim();
  double defect = 0.0;
  double scale = 0.0;
  std::vector<int> idx(dim);
  for (std::size_t c = 0; c < f.components(); ++c) {
    auto coef = f.coefficients(c);
    for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
      scale = std::max(scale, std::abs(coef[mode]));
      const int last = static_cast<int>(mode % half);
      if (last != 0 && last != n / 2) continue;
      std::size_t rest = mode / half;
      for (int a = dim - 2; a >= 0; --a) {
        idx[a] = static_cast<int>(rest % n);
        rest /= n;
      }
      std::size_t partner = 0;
      for (int a = 0; a < dim - 1; ++a) partner = partner * n + (n - idx[a]) % n;
      partner = partner * half + last;
      defect = std::max(defect, std::abs(coef[mode] - std::conj(coef[partner])));
    }
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

}  // namespace leray_lab
