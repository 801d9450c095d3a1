#pragma once

#include "leray_lab/norms.hpp"
#include "leray_lab/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace leray_lab {

/// One evaluated inequality lhs <= rhs (or, for identities, lhs == rhs).
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

inline InequalityReport make_report(std::string name, double lhs, double rhs, double tol) {
  InequalityReport r{std::move(name), lhs, rhs, 0.0, tol, false};
  if (rhs > 0.0) {
    r.ratio = lhs / rhs;
  } else {
    r.ratio = lhs > 0.0 ? kInfinity : 0.0;
  }
  r.passed = lhs <= rhs * (1.0 + tol);
  return r;
}

/// Identity check: passes when |lhs/rhs - 1| <= tol.
inline InequalityReport make_identity_report(std::string name, double lhs, double rhs, double tol) {
  InequalityReport r = make_report(std::move(name), lhs, rhs, tol);
  r.passed = (lhs == rhs) || (rhs > 0.0 && std::abs(r.ratio - 1.0) <= tol);
  return r;
}

/// Tolerances used by the inequality sweeps.
struct Tolerances {
  double box = 1e-3;       // R^n inequalities evaluated on the periodic box
  double radial = 1e-9;    // quadrature-evaluated radial corpus
  double exact = 1e-12;    // identities and Hoelder-type interpolation
};

/// Optimal Gagliardo-Nirenberg constants for L^3 in R^3 and R^4.
struct GammaConstants {
  double gamma3 = 0.0;
  double gamma4 = 0.0;

  double gamma(int dim) const {
    if (dim == 3) return gamma3;
    if (dim == 4) return gamma4;
    throw InvalidArgument("Gagliardo-Nirenberg constants exist for n = 3, 4 only");
  }
};

/// Published upper bounds for the optimal constants.
inline constexpr GammaConstants kPublishedGamma{0.558901115737, 0.419577519172};

/// L^2 weight alpha in ||u||_3 <= Gamma ||u||_2^alpha ||Du||_2^{1-alpha}.
inline double gn_l2_exponent(int dim) {
  if (dim == 3) return 0.5;
  if (dim == 4) return 1.0 / 3.0;
  throw InvalidArgument("Gagliardo-Nirenberg ratio is defined for n = 3, 4 only");
}

inline double gn_ratio_from_norms(int dim, double l3, double l2, double dl2) {
  if (l2 == 0.0 || dl2 == 0.0) throw InvalidArgument("Gagliardo-Nirenberg ratio of a zero field");
  const double alpha = gn_l2_exponent(dim);
  return l3 / (std::pow(l2, alpha) * std::pow(dl2, 1.0 - alpha));
}

/// ||f||_{L^3} / (||f||_2^alpha ||Df||_2^{1-alpha}) by radial quadrature.
inline double gn_ratio(const RadialFunction& f) {
  return gn_ratio_from_norms(f.dim, radial_lq_norm(f, 3.0), radial_lq_norm(f, 2.0),
                             radial_gradient_l2_norm(f));
}

/// Same ratio for a periodic-box field, using component-summed vector norms.
inline double gn_ratio(const Field& u) {
  const int dim = u.grid().dim();
  gn_l2_exponent(dim);
  return gn_ratio_from_norms(dim, lq_norm(u, 3.0), dm_l2_norm(u, 0), dm_l2_norm(u, 1));
}

/// Gamma_3, Gamma_4 evaluated at the sech^2 extremal.
inline GammaConstants optimal_constants(double rate = 1.0) {
  return GammaConstants{gn_ratio(sech2_profile(3, 1.0, rate)), gn_ratio(sech2_profile(4, 1.0, rate))};
}

/// Computed once per process; the quadrature is deterministic.
inline const GammaConstants& computed_constants() {
  static const GammaConstants constants = optimal_constants();
  return constants;
}

namespace detail {

/// Pointers to the samples of D_j u_i, indexed [i * n + j].
inline std::vector<const RealArray*> gradient_samples(DerivativeCache& cache) {
  const int n = cache.grid().dim();
  std::vector<const RealArray*> out(n * n);
  for (int j = 0; j < n; ++j) {
    const auto& d = cache.samples({j});
    for (int i = 0; i < n; ++i) out[i * n + j] = &d[i];
  }
  return out;
}

/// Pointers to the samples of D_k D_j u_i, indexed [(i * n + j) * n + k].
inline std::vector<const RealArray*> hessian_samples(DerivativeCache& cache) {
  const int n = cache.grid().dim();
  std::vector<const RealArray*> out(n * n * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const auto& d = cache.samples({j, k});
      for (int i = 0; i < n; ++i) out[(i * n + j) * n + k] = &d[i];
    }
  return out;
}

inline double trilinear_from_gradient(const Grid& g, const std::vector<const RealArray*>& du) {
  const int n = g.dim();
  const std::size_t np = g.sample_count();
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double* dji = du[i * n + j]->data();
      for (int l = 0; l < n; ++l) {
        const double* dli = du[i * n + l]->data();
        const double* dlj = du[j * n + l]->data();
        double s = 0.0;
        for (std::size_t p = 0; p < np; ++p) s += std::abs(dli[p] * dlj[p] * dji[p]);
        total += s;
      }
    }
  return total * g.cell_volume();
}

inline void require_inequality_dim(const Field& u) {
  const int dim = u.grid().dim();
  if (dim != 3 && dim != 4) throw InvalidArgument("this inequality is stated for n = 3, 4");
  if (u.components() != static_cast<std::size_t>(dim))
    throw InvalidArgument("expected an n-component vector field");
}

}  // namespace detail

/// int sum_{i,j,l} |D_l u_i| |D_l u_j| |D_j u_i| dx on the grid.
inline double trilinear_lhs(const Field& u) {
  detail::require_inequality_dim(u);
  DerivativeCache cache(u);
  return detail::trilinear_from_gradient(cache.grid(), detail::gradient_samples(cache));
}

/// The proof chain behind the trilinear estimate, link by link.
struct TrilinearChainReport {
  InequalityReport pointwise;      // trilinear <= ||w||_3^3
  InequalityReport w_identity;     // ||w||_2 == ||Du||_2
  InequalityReport w_gradient;     // ||Dw||_2 <= ||D^2 u||_2
  InequalityReport composite;      // trilinear <= Gamma^3 ||Du||^a ||D^2u||^b
  double epsilon_sensitivity = 0.0;  // relative change of ||Dw|| between eps and 10 eps

  bool passed() const {
    return pointwise.passed && w_identity.passed && w_gradient.passed && composite.passed &&
           epsilon_sensitivity <= 1e-6;
  }
  std::array<const InequalityReport*, 4> links() const {
    return {&pointwise, &w_identity, &w_gradient, &composite};
  }
};

inline TrilinearChainReport trilinear_chain_check(DerivativeCache& cache, const GammaConstants& gammas,
                                   const Tolerances& tol = {}) {
  const Grid& g = cache.grid();
  const int n = g.dim();
  if ((n != 3 && n != 4) || cache.field().components() != static_cast<std::size_t>(n))
    throw InvalidArgument("the trilinear estimate needs an n-component field, n = 3, 4");
  const std::size_t np = g.sample_count();
  const auto du = detail::gradient_samples(cache);
  const auto d2u = detail::hessian_samples(cache);
  const double dv = g.cell_volume();

  RealArray w2(np, 0.0);
  for (const RealArray* a : du)
    for (std::size_t p = 0; p < np; ++p) w2[p] += (*a)[p] * (*a)[p];
  double w3 = 0.0;
  double w2_sum = 0.0;
  double w_max = 0.0;
  for (double v2 : w2) {
    const double v = std::sqrt(v2);
    w3 += v2 * v;
    w2_sum += v2;
    w_max = std::max(w_max, v);
  }
  w3 *= dv;

  // Gradient of w_eps = sqrt(|Du|^2 + eps^2) by the chain rule, so the
  // comparison with |D^2 u| is made sample by sample.
  const double eps = 1e-8 * w_max;
  const double eps_coarse = 10.0 * eps;
  RealArray dk(np);
  double dw_sq = 0.0;
  double dw_coarse_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    std::fill(dk.begin(), dk.end(), 0.0);
    for (int ij = 0; ij < n * n; ++ij) {
      const double* a = du[ij]->data();
      const double* b = d2u[ij * n + k]->data();
      for (std::size_t p = 0; p < np; ++p) dk[p] += a[p] * b[p];
    }
    for (std::size_t p = 0; p < np; ++p) {
      const double num = dk[p] * dk[p];
      if (num == 0.0) continue;
      dw_sq += num / (w2[p] + eps * eps);
      dw_coarse_sq += num / (w2[p] + eps_coarse * eps_coarse);
    }
  }
  const double dw = std::sqrt(dw_sq * dv);
  const double dw_coarse = std::sqrt(dw_coarse_sq * dv);
  double d2u_phys = 0.0;
  for (const RealArray* a : d2u)
    for (double v : *a) d2u_phys += v * v;
  d2u_phys = std::sqrt(d2u_phys * dv);

  const double tri = detail::trilinear_from_gradient(g, du);
  const double du_l2 = std::sqrt(detail::spectral_dm_l2_squared(cache.field(), 1));
  const double d2u_l2 = std::sqrt(detail::spectral_dm_l2_squared(cache.field(), 2));
  const double gamma_cubed = std::pow(gammas.gamma(n), 3);
  const double bound = n == 3 ? gamma_cubed * std::pow(du_l2, 1.5) * std::pow(d2u_l2, 1.5)
                              : gamma_cubed * du_l2 * d2u_l2 * d2u_l2;

  TrilinearChainReport r;
  r.pointwise = make_report("trilinear<=|w|_3^3", tri, w3, tol.exact);
  r.w_identity = make_identity_report("|w|_2==|Du|_2", std::sqrt(w2_sum * dv), du_l2, tol.exact);
  r.w_gradient = make_report("|Dw|_2<=|D2u|_2", dw, d2u_phys, tol.exact);
  r.composite = make_report(n == 3 ? "trilinear_n3" : "trilinear_n4", tri, bound, tol.box);
  r.epsilon_sensitivity = dw > 0.0 ? std::abs(dw - dw_coarse) / dw : 0.0;
  return r;
}

inline TrilinearChainReport trilinear_chain_check(const Field& u, const GammaConstants& gammas,
                                   const Tolerances& tol = {}) {
  DerivativeCache cache(u);
  return trilinear_chain_check(cache, gammas, tol);
}

inline TrilinearChainReport trilinear_chain_check(const Field& u) { return trilinear_chain_check(u, computed_constants()); }

/// ||D^l u|| <= ||u||^{1-l/m} ||D^m u||^{l/m}.
inline InequalityReport interpolation_check(const Field& u, int l, int m, double tol = 1e-12) {
  if (l < 0 || l > m || m > kMaxTupleOrder)
    throw InvalidArgument("interpolation needs 0 <= l <= m <= 4");
  const Field s = with_spectral(u);
  const double u0 = dm_l2_norm(s, 0);
  if (u0 == 0.0) throw InvalidArgument("interpolation inequality of a zero field");
  const double lhs = dm_l2_norm(s, l);
  const double theta = m == 0 ? 0.0 : static_cast<double>(l) / m;
  const double rhs = std::pow(u0, 1.0 - theta) * std::pow(dm_l2_norm(s, m), theta);
  return make_report("interp(" + std::to_string(l) + "," + std::to_string(m) + ")", lhs, rhs, tol);
}

/// ||Du|| <= ||u||^{1/2} ||D^2 u||^{1/2}.
inline InequalityReport first_interp_check(const Field& u, double tol = 1e-12) {
  InequalityReport r = interpolation_check(u, 1, 2, tol);
  r.name = "|Du|<=|u|^1/2|D2u|^1/2";
  return r;
}

/// ||u||_{L^4(R^4)} <= ||Du||_{L^2(R^4)} on a periodic-box field.
inline InequalityReport embedding_4d_check(const Field& u, double tol = 1e-3) {
  if (u.grid().dim() != 4) throw InvalidArgument("the L^4 embedding check needs a 4D grid");
  return make_report("L4<=|Du|_2", lq_norm(u, 4.0), dm_l2_norm(u, 1), tol);
}

/// Radial route of the same embedding, evaluated by quadrature on R^4.
inline InequalityReport embedding_4d_check(const RadialFunction& f, double tol = 1e-10) {
  if (f.dim != 4) throw InvalidArgument("the L^4 embedding check needs a function on R^4");
  return make_report("L4<=|Du|_2(radial)", radial_lq_norm(f, 4.0), radial_gradient_l2_norm(f), tol);
}

/// ||D^l u||_4 ||D^{m-l} u||_4 <= ||Du||_2 ||D^{m+1} u||_2 on R^4.
inline InequalityReport product_estimate_4d_check(const Field& u, int l, int m, double tol = 1e-3) {
  if (u.grid().dim() != 4) throw InvalidArgument("the product estimate needs a 4D grid");
  if (l < 0 || l > m || m > 3) throw InvalidArgument("product estimate needs 0 <= l <= m <= 3");
  const Field s = with_spectral(u);
  const NormRequest lreq{l, 4.0, NormRoute::physical};
  const NormRequest rreq{m - l, 4.0, NormRoute::physical};
  const double lhs = dm_lq_norm(s, lreq) * dm_lq_norm(s, rreq);
  const double rhs = dm_l2_norm(s, 1) * dm_l2_norm(s, m + 1);
  return make_report("product(" + std::to_string(l) + "," + std::to_string(m) + ")", lhs, rhs, tol);
}

/// Every (l, m) pair with 0 <= l <= m <= 3, sharing the norm evaluations.
inline std::vector<InequalityReport> product_estimate_4d_sweep(DerivativeCache& cache,
                                                               double tol = 1e-3) {
  if (cache.grid().dim() != 4) throw InvalidArgument("the product estimate needs a 4D grid");
  std::array<double, 4> l4{};
  for (int k = 0; k <= 3; ++k) l4[k] = dm_lq_norm(cache, NormRequest{k, 4.0, NormRoute::physical});
  std::array<double, 5> l2{};
  for (int k = 1; k <= 4; ++k) l2[k] = std::sqrt(detail::spectral_dm_l2_squared(cache.field(), k));
  std::vector<InequalityReport> out;
  for (int m = 0; m <= 3; ++m)
    for (int l = 0; l <= m; ++l)
      out.push_back(make_report("product(" + std::to_string(l) + "," + std::to_string(m) + ")",
                                l4[l] * l4[m - l], l2[1] * l2[m + 1], tol));
  return out;
}

}  // namespace leray_lab
