#pragma once

#include "leray_lab/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace leray_lab {

enum class NormRoute { spectral, physical, automatic };

/// Derivative order m, Lebesgue exponent q (q = infinity allowed) and the
/// evaluation route for a ||D^m u||_{L^q} request.
struct NormRequest {
  int m = 0;
  double q = 2.0;
  NormRoute route = NormRoute::automatic;
};

/// Largest derivative order evaluated by enumerating derivative tuples.
inline constexpr int kMaxTupleOrder = 4;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

inline void check_exponent(double q) {
  if (!(q >= 1.0)) throw InvalidArgument("Lebesgue exponent must satisfy q >= 1");
}

/// sum_i int |f_i|^q dx over the grid (Riemann sum), or max |f_i| for q = inf.
inline double accumulate_power(const Grid& g, std::span<const double> f, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (q == 2.0) {
    for (double v : f) s += v * v;
  } else if (q == 3.0) {
    for (double v : f) s += std::abs(v) * v * v;
  } else if (q == 4.0) {
    for (double v : f) {
      const double v2 = v * v;
      s += v2 * v2;
    }
  } else {
    for (double v : f) s += std::pow(std::abs(v), q);
  }
  return s * g.cell_volume();
}

/// Spectral ||D^m u||_2^2 = V sum_k |k|^{2m} |u_k|^2 over all components.
inline double spectral_dm_l2_squared(const Field& s, int m) {
  const Grid& g = s.grid();
  const auto& k2 = g.k_squared();
  const auto& w = g.mode_weight();
  double total = 0.0;
  for (std::size_t c = 0; c < s.components(); ++c) {
    auto coef = s.coefficients(c);
    for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
      const double a = std::norm(coef[mode]);
      if (a == 0.0) continue;
      total += w[mode] * std::pow(k2[mode], m) * a;
    }
  }
  return total * g.volume();
}

}  // namespace detail

/// Physical samples of D_{j_1}..D_{j_m} u for the derivative multisets an
/// analysis touches. Derivatives commute, so a tuple and its permutations
/// share one entry; each entry is transformed once.
class DerivativeCache {
 public:
  explicit DerivativeCache(const Field& u) : spectral_(with_spectral(u)) {}

  const Field& field() const { return spectral_; }
  const Grid& grid() const { return spectral_.grid(); }

  /// Samples of every component of D_{axes...} u; `axes` in any order.
  const std::vector<RealArray>& samples(std::vector<int> axes) {
    std::sort(axes.begin(), axes.end());
    auto it = cache_.find(axes);
    if (it == cache_.end()) {
      it = cache_.emplace(std::move(axes), compute(axes)).first;
    }
    return it->second;
  }

 private:
  std::vector<RealArray> compute(const std::vector<int>& axes) const {
    const Grid& g = grid();
    static constexpr Complex unit_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex phase = unit_powers[axes.size() % 4];
    std::vector<RealArray> out;
    ComplexArray scratch(g.mode_count());
    for (std::size_t c = 0; c < spectral_.components(); ++c) {
      auto coef = spectral_.coefficients(c);
      for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
        double factor = 1.0;
        for (int a : axes) factor *= g.wavevector(a)[mode];
        scratch[mode] = coef[mode] * (phase * factor);
      }
      RealArray samples(g.sample_count());
      g.plans().inverse(scratch.data(), samples.data());
      out.push_back(std::move(samples));
    }
    return out;
  }

  Field spectral_;
  std::map<std::vector<int>, std::vector<RealArray>> cache_;
};

/// ||u||_{L^q}: {sum_i int |u_i|^q}^{1/q}, or max_i ||u_i||_inf for q = inf.
inline double lq_norm(const Field& u, double q) {
  detail::check_exponent(q);
  Field p = with_physical(u);
  if (std::isinf(q)) {
    double m = 0.0;
    for (std::size_t c = 0; c < p.components(); ++c)
      m = std::max(m, detail::accumulate_power(p.grid(), p.samples(c), q));
    return m;
  }
  double s = 0.0;
  for (std::size_t c = 0; c < p.components(); ++c)
    s += detail::accumulate_power(p.grid(), p.samples(c), q);
  return std::pow(s, 1.0 / q);
}

/// ||D^m u||_{L^q} summed over all n^m derivative tuples and all components.
/// Every tuple (j_1..j_m) is enumerated; tuples that are permutations of one
/// another reuse the same integral.
inline double dm_lq_norm(DerivativeCache& cache, const NormRequest& req) {
  detail::check_exponent(req.q);
  if (req.m < 0) throw InvalidArgument("derivative order must be nonnegative");
  const Grid& g = cache.grid();
  const bool use_spectral =
      req.route == NormRoute::spectral || (req.route == NormRoute::automatic && req.q == 2.0);
  if (use_spectral) {
    if (req.q != 2.0) throw InvalidArgument("spectral route only exists for q = 2");
    return std::sqrt(detail::spectral_dm_l2_squared(cache.field(), req.m));
  }
  if (req.m > kMaxTupleOrder)
    throw InvalidArgument("derivative tuple cap exceeded: m = " + std::to_string(req.m));
  const bool inf = std::isinf(req.q);
  const int n = g.dim();
  std::map<std::vector<int>, double> integrals;
  double acc = 0.0;
  std::vector<int> tuple(req.m, 0);
  while (true) {
    std::vector<int> key = tuple;
    std::sort(key.begin(), key.end());
    auto it = integrals.find(key);
    if (it == integrals.end()) {
      double v = 0.0;
      for (const RealArray& f : cache.samples(key)) {
        const double part = detail::accumulate_power(g, f, req.q);
        v = inf ? std::max(v, part) : v + part;
      }
      it = integrals.emplace(key, v).first;
    }
    acc = inf ? std::max(acc, it->second) : acc + it->second;
    int pos = req.m - 1;
    while (pos >= 0 && ++tuple[pos] == n) tuple[pos--] = 0;
    if (pos < 0) break;
  }
  return inf ? acc : std::pow(acc, 1.0 / req.q);
}

inline double dm_lq_norm(const Field& u, const NormRequest& req) {
  DerivativeCache cache(u);
  return dm_lq_norm(cache, req);
}

inline double dm_lq_norm(const Field& u, int m, double q) {
  return dm_lq_norm(u, NormRequest{m, q, NormRoute::automatic});
}

/// ||D^m u||_{L^2} by the spectral identity.
inline double dm_l2_norm(const Field& u, int m) {
  return dm_lq_norm(u, NormRequest{m, 2.0, NormRoute::spectral});
}

/// max over i, j_1..j_m of ||D_{j_1}..D_{j_m} u_i||_inf (grid-sample maxima).
inline double linf_dm_norm(const Field& u, int m) {
  return dm_lq_norm(u, NormRequest{m, kInfinity, NormRoute::physical});
}

/// L^2 inner product <u, v> over all components (spectral).
inline double l2_inner(const Field& u, const Field& v) {
  const Field a = with_spectral(u);
  const Field b = with_spectral(v);
  const Grid& g = a.grid();
  const auto& w = g.mode_weight();
  double s = 0.0;
  for (std::size_t c = 0; c < a.components(); ++c) {
    auto x = a.coefficients(c);
    auto y = b.coefficients(c);
    for (std::size_t mode = 0; mode < g.mode_count(); ++mode)
      s += w[mode] * (std::conj(x[mode]) * y[mode]).real();
  }
  return s * g.volume();
}

}  // namespace leray_lab
