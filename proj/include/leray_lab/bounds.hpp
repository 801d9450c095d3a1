#pragma once

#include "leray_lab/inequalities.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace leray_lab {

/// Which Gamma values feed the bound calculator.
enum class GammaPreset { computed, published };

/// Published upper bounds for the regularity-time constants.
inline constexpr double kPublishedK3 = 0.000464504284;
inline constexpr double kPublishedK4 = 0.002727993110;

/// 1/(128 pi^2), the previously best known value for K_3.
inline constexpr double kClassicalK3 = 1.0 / (128.0 * std::numbers::pi * std::numbers::pi);

/// gamma^exponent / 2; exponent 12 gives K_3 from Gamma_3, 6 gives K_4 from Gamma_4.
inline double bound_constant(double gamma, int exponent) {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (exponent != 12 && exponent != 6 && gamma != 1.0)
    throw InvalidArgument("bound exponent must be 12 (n = 3) or 6 (n = 4)");
  return 0.5 * std::pow(gamma, exponent);
}

inline GammaConstants preset_constants(GammaPreset preset) {
  return preset == GammaPreset::published ? kPublishedGamma : computed_constants();
}

/// t* <= K_3 nu^-5 |u0|^4 (n = 3) or K_4 nu^-3 |u0|^2 (n = 4).
inline double regularity_time_bound(int dim, double nu, double l2_u0,
                                    const GammaConstants& gammas = computed_constants()) {
  if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
  if (l2_u0 < 0.0) throw InvalidArgument("initial L2 norm must be nonnegative");
  if (dim == 3) return bound_constant(gammas.gamma3, 12) * std::pow(nu, -5) * std::pow(l2_u0, 4);
  if (dim == 4) return bound_constant(gammas.gamma4, 6) * std::pow(nu, -3) * std::pow(l2_u0, 2);
  throw InvalidArgument("regularity-time bound is stated for n = 3, 4");
}

/// (1/(128 pi^2)) nu^-5 |u0|^4.
inline double classical_bound(double nu, double l2_u0) {
  if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
  return kClassicalK3 * std::pow(nu, -5) * std::pow(l2_u0, 4);
}

/// Strict smallness test: Gamma_3^3 |u|^1/2 |Du|^1/2 < nu (n = 3) or
/// Gamma_4^3 |Du| < nu (n = 4). `l2` is ignored for n = 4.
inline bool smallness_criterion(int dim, double nu, double l2, double dl2,
                                const GammaConstants& gammas = computed_constants()) {
  if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
  if (l2 < 0.0 || dl2 < 0.0) throw InvalidArgument("norms must be nonnegative");
  if (dim == 3) return std::pow(gammas.gamma3, 3) * std::sqrt(l2 * dl2) < nu;
  if (dim == 4) return std::pow(gammas.gamma4, 3) * dl2 < nu;
  throw InvalidArgument("smallness criterion is stated for n = 3, 4");
}

struct BoundReport {
  std::string preset;
  double gamma3 = 0.0;
  double gamma4 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double classical_k3 = kClassicalK3;
  double improvement_ratio = 0.0;  // classical_k3 / k3
  double nu = 1.0;
  double l2_u0 = 1.0;
  double t_star_bound_3d = 0.0;
  double t_star_bound_4d = 0.0;
  double classical_t_star_bound_3d = 0.0;
};

inline BoundReport make_bound_report(GammaPreset preset, double nu = 1.0, double l2_u0 = 1.0) {
  const GammaConstants g = preset_constants(preset);
  BoundReport r;
  r.preset = preset == GammaPreset::published ? "paper" : "computed";
  r.gamma3 = g.gamma3;
  r.gamma4 = g.gamma4;
  r.k3 = bound_constant(g.gamma3, 12);
  r.k4 = bound_constant(g.gamma4, 6);
  r.improvement_ratio = kClassicalK3 / r.k3;
  r.nu = nu;
  r.l2_u0 = l2_u0;
  r.t_star_bound_3d = regularity_time_bound(3, nu, l2_u0, g);
  r.t_star_bound_4d = regularity_time_bound(4, nu, l2_u0, g);
  r.classical_t_star_bound_3d = classical_bound(nu, l2_u0);
  return r;
}

}  // namespace leray_lab
