#pragma once

#include "leray_lab/bounds.hpp"
#include "leray_lab/corpus.hpp"
#include "leray_lab/quadrature.hpp"
#include "leray_lab/spectral_ops.hpp"
#include "leray_lab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace leray_lab {

/// Invalid solver or CLI configuration.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Non-finite state detected during time stepping.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InitialKind { zero, taylor_green, random_spectrum, file };

struct InitialCondition {
  InitialKind kind = InitialKind::taylor_green;
  std::uint64_t seed = 1;
  double energy = 1.0;        // target ||u0||_2 for random_spectrum
  double peak_k = 4.0;        // spectral peak for random_spectrum
  double amplitude = 1.0;     // Taylor-Green amplitude
  double perturbation = 0.0;  // relative L2 size of a random perturbation on Taylor-Green
  std::string path;           // trajectory file for kind == file
};

/// Snapshot times linspace(t_start, t_stop, count) for the Duhamel check.
struct SnapshotSchedule {
  double t_start = 0.0;
  double t_stop = 0.0;
  int count = 0;
};

struct SolverConfig {
  Grid grid;
  double nu = 0.1;
  double t_end = 1.0;
  double dt = 0.0;               // fixed step; 0 selects the adaptive CFL step
  double cfl = 0.4;              // dt <= cfl * dx / max|u|
  double viscous_safety = 0.5;   // dt <= viscous_safety / (nu k_max^2); 0 disables
  InitialCondition initial;
  double sample_interval = 0.01;
  int m_max = 3;
  bool nonlinear = true;
  std::optional<SnapshotSchedule> snapshots;
  GammaConstants gammas = computed_constants();
};

/// Velocity in spectral form at a given time.
struct State {
  double time = 0.0;
  Field u;
};

struct DiagnosticSample {
  double t = 0.0;
  double l2 = 0.0;
  std::vector<double> dl2;  // ||D^m u||_2 for m = 1..m_max
  double residual = 0.0;    // energy-balance residual over [0, t]
  bool criterion = false;   // Gamma_3^3 ||u||^1/2 ||Du||^1/2 < nu
  double sqrt_t_dl2 = 0.0;
};

struct DiagnosticsSeries {
  int dim = 0;
  double nu = 0.0;
  int m_max = 0;
  std::vector<DiagnosticSample> samples;

  std::vector<double> times() const {
    std::vector<double> t;
    for (const auto& s : samples) t.push_back(s.t);
    return t;
  }
  /// ||D^m u|| per sample; m = 0 gives ||u||.
  std::vector<double> norms(int m) const {
    if (m < 0 || m > m_max) throw InvalidArgument("derivative order not tracked in series");
    std::vector<double> v;
    for (const auto& s : samples) v.push_back(m == 0 ? s.l2 : s.dl2[m - 1]);
    return v;
  }
};

struct SimulationResult {
  DiagnosticsSeries series;
  TrajectoryStore trajectory;
  std::size_t steps = 0;
  double max_divergence_defect = 0.0;
  double worst_energy_increase = 0.0;  // max relative per-step growth of ||u||
  double max_grid_reynolds = 0.0;      // max|u| dx / nu
  std::vector<std::string> warnings;
};

namespace detail {

/// sum over modes of w |k|^{2m} |u|^2 times the box volume, for m = 0..m_max.
inline std::vector<double> sobolev_squares(const Grid& g, const std::vector<ComplexArray>& u,
                                           int m_max) {
  std::vector<double> acc(m_max + 1, 0.0);
  const auto& k2 = g.k_squared();
  const auto& w = g.mode_weight();
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    double a = 0.0;
    for (const auto& c : u) a += std::norm(c[mode]);
    if (a == 0.0) continue;
    double weight = w[mode] * a;
    for (int m = 0; m <= m_max; ++m) {
      acc[m] += weight;
      weight *= k2[mode];
    }
  }
  for (double& v : acc) v *= g.volume();
  return acc;
}

inline bool all_finite(const std::vector<ComplexArray>& u) {
  for (const auto& c : u)
    for (const auto& v : c)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

inline double max_abs_velocity(const Grid& g, const std::vector<ComplexArray>& u) {
  double m = 0.0;
  for (const auto& c : u) {
    const RealArray p = inverse_component(g, c);
    for (double v : p) m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace detail

/// Integrating-factor RK4 for u_t = nu Lap u - Q(u) in spectral space. The
/// viscous factor exp(-nu |k|^2 t) is applied exactly; RK4 handles Q.
class Integrator {
 public:
  Integrator(Grid grid, double nu, bool nonlinear)
      : grid_(std::move(grid)), nu_(nu), nonlinear_(nonlinear), advection_(grid_) {
    const int n = grid_.dim();
    const std::size_t nm = grid_.mode_count();
    for (auto* v : {&a_, &b_, &c_, &d_, &tmp_}) v->assign(n, ComplexArray(nm));
    half_.resize(nm);
    full_.resize(nm);
  }

  const Grid& grid() const { return grid_; }
  double nu() const { return nu_; }

  /// -Q(u), or zero when the nonlinearity is disabled.
  void rhs(const std::vector<ComplexArray>& u, std::vector<ComplexArray>& out) {
    if (!nonlinear_) {
      for (auto& c : out) std::fill(c.begin(), c.end(), Complex{});
      return;
    }
    advection_.apply(u, out);
    for (auto& c : out)
      for (auto& v : c) v = -v;
  }

  void step(std::vector<ComplexArray>& u, double dt) {
    const std::size_t nm = grid_.mode_count();
    const auto& k2 = grid_.k_squared();
    if (dt != cached_dt_) {
      for (std::size_t mode = 0; mode < nm; ++mode) {
        half_[mode] = std::exp(-0.5 * nu_ * k2[mode] * dt);
        full_[mode] = half_[mode] * half_[mode];
      }
      cached_dt_ = dt;
    }
    const std::size_t n = u.size();
    const double h2 = 0.5 * dt;

    rhs(u, a_);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < nm; ++k) tmp_[i][k] = half_[k] * (u[i][k] + h2 * a_[i][k]);
    rhs(tmp_, b_);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < nm; ++k) tmp_[i][k] = half_[k] * u[i][k] + h2 * b_[i][k];
    rhs(tmp_, c_);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < nm; ++k) tmp_[i][k] = full_[k] * u[i][k] + dt * half_[k] * c_[i][k];
    rhs(tmp_, d_);
    const double h6 = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < nm; ++k)
        u[i][k] = full_[k] * u[i][k] +
                  h6 * (full_[k] * a_[i][k] + 2.0 * half_[k] * (b_[i][k] + c_[i][k]) + d_[i][k]);
    if (!detail::all_finite(u))
      throw InstabilityError("non-finite velocity coefficients after step to dt = " +
                             std::to_string(dt));
  }

 private:
  Grid grid_;
  double nu_;
  bool nonlinear_;
  AdvectionOperator advection_;
  std::vector<ComplexArray> a_, b_, c_, d_, tmp_;
  std::vector<double> half_, full_;
  double cached_dt_ = -1.0;
};

/// One integrating-factor RK4 step of the projected system.
inline State step(const State& state, double dt, double nu, bool nonlinear = true) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  Field s = with_spectral(state.u);
  std::vector<ComplexArray> u = s.coefficient_arrays();
  Integrator integrator(s.grid(), nu, nonlinear);
  integrator.step(u, dt);
  return State{state.time + dt, Field::from_coefficients(s.grid(), std::move(u))};
}

inline void validate(const SolverConfig& c) {
  if (c.grid.dim() != 2 && c.grid.dim() != 3)
    throw ConfigError("time integration supports dim 2 or 3 only");
  if (!(c.nu > 0.0)) throw ConfigError("nu must be positive");
  if (!(c.t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (c.dt < 0.0) throw ConfigError("dt must be nonnegative");
  if (c.dt == 0.0 && !(c.cfl > 0.0)) throw ConfigError("cfl must be positive for adaptive steps");
  if (c.viscous_safety < 0.0) throw ConfigError("viscous_safety must be nonnegative");
  if (!(c.sample_interval > 0.0)) throw ConfigError("sample_interval must be positive");
  if (c.m_max < 1 || c.m_max > 8) throw ConfigError("m_max must lie in [1, 8]");
  if (c.initial.kind == InitialKind::random_spectrum &&
      (!(c.initial.energy >= 0.0) || !(c.initial.peak_k > 0.0)))
    throw ConfigError("random_spectrum needs energy >= 0 and peak_k > 0");
  if (c.snapshots) {
    const auto& s = *c.snapshots;
    if (s.count < 2 || s.t_start < 0.0 || !(s.t_stop > s.t_start) || s.t_stop > c.t_end + 1e-12)
      throw ConfigError("snapshot schedule must satisfy 0 <= t_start < t_stop <= t_end, count >= 2");
  }
}

namespace detail {

inline Field taylor_green_field(const Grid& g, double amplitude) {
  const double k = g.wavenumber_unit();
  return sample_field(g, g.dim(), [&](std::span<const double> x, std::span<double> out) {
    if (g.dim() == 2) {
      out[0] = amplitude * std::sin(k * x[0]) * std::cos(k * x[1]);
      out[1] = -amplitude * std::cos(k * x[0]) * std::sin(k * x[1]);
    } else {
      const double cz = std::cos(k * x[2]);
      out[0] = amplitude * std::sin(k * x[0]) * std::cos(k * x[1]) * cz;
      out[1] = -amplitude * std::cos(k * x[0]) * std::sin(k * x[1]) * cz;
      out[2] = 0.0;
    }
  });
}

/// Divergence-free random field with energy spectrum ~ (k/kp)^4 exp(-2 (k/kp)^2),
/// restricted to the dealiased band and scaled to ||u||_2 = target.
inline Field random_spectrum_field(const Grid& g, std::uint64_t seed, double peak_k, double target) {
  Rng rng(seed);
  std::normal_distribution<double> gauss;
  const int n = g.dim();
  std::vector<ComplexArray> coef(n, ComplexArray(g.mode_count()));
  const auto& keep = g.dealias_mask();
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    const double k = std::sqrt(g.k_squared()[mode]);
    for (int c = 0; c < n; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      if (!keep[mode] || k == 0.0) continue;
      const double x = k / peak_k;
      // amplitude^2 ~ E(k) / k^{n-1} spreads E(k) over the shell
      const double amp = std::sqrt(x * x * x * x * std::exp(-2.0 * x * x) / std::pow(k, n - 1));
      coef[c][mode] = Complex(re, im) * amp;
    }
  }
  Field raw = with_physical(Field::from_coefficients(g, std::move(coef)));
  Field u = leray_project(Field::from_samples(g, raw.sample_arrays()));
  u = dealias(u);
  const double norm = dm_l2_norm(u, 0);
  std::vector<ComplexArray> c = u.coefficient_arrays();
  if (norm > 0.0)
    for (auto& a : c)
      for (auto& v : a) v *= target / norm;
  return Field::from_coefficients(g, std::move(c));
}

}  // namespace detail

/// Divergence-free spectral initial state for `config`.
inline State initialize(const SolverConfig& config) {
  validate(config);
  const Grid& g = config.grid;
  const InitialCondition& ic = config.initial;
  Field u;
  switch (ic.kind) {
    case InitialKind::zero:
      u = Field(g, g.dim(), Representation::spectral);
      break;
    case InitialKind::taylor_green: {
      u = with_spectral(detail::taylor_green_field(g, ic.amplitude));
      if (ic.perturbation > 0.0) {
        const double base = dm_l2_norm(u, 0);
        const Field p = detail::random_spectrum_field(g, ic.seed, 4.0, ic.perturbation * base);
        std::vector<ComplexArray> c = u.coefficient_arrays();
        for (int a = 0; a < g.dim(); ++a)
          for (std::size_t k = 0; k < g.mode_count(); ++k) c[a][k] += p.coefficients(a)[k];
        u = Field::from_coefficients(g, std::move(c));
      }
      break;
    }
    case InitialKind::random_spectrum:
      u = detail::random_spectrum_field(g, ic.seed, ic.peak_k, ic.energy);
      break;
    case InitialKind::file:
      try {
        u = read_initial_field(ic.path, g);
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("initial.path: ") + e.what());
      }
      break;
  }
  u = dealias(leray_project(u));
  return State{0.0, Field::from_coefficients(g, u.coefficient_arrays())};
}

namespace detail {

inline std::vector<double> event_times(const SolverConfig& c) {
  std::vector<double> t;
  const auto count = static_cast<long>(std::floor(c.t_end / c.sample_interval + 1e-9));
  for (long i = 0; i <= count; ++i) t.push_back(i * c.sample_interval);
  if (c.t_end - t.back() > 1e-12) t.push_back(c.t_end);
  if (c.snapshots) {
    const auto& s = *c.snapshots;
    for (int i = 0; i < s.count; ++i)
      t.push_back(s.t_start + (s.t_stop - s.t_start) * i / (s.count - 1));
  }
  std::sort(t.begin(), t.end());
  std::vector<double> unique;
  for (double v : t)
    if (unique.empty() || v - unique.back() > 1e-12) unique.push_back(v);
  return unique;
}

inline bool is_sample_time(const SolverConfig& c, double t) {
  const double k = std::round(t / c.sample_interval);
  return std::abs(t - k * c.sample_interval) <= 1e-12 || std::abs(t - c.t_end) <= 1e-12;
}

inline bool is_snapshot_time(const SolverConfig& c, double t) {
  if (!c.snapshots) return false;
  const auto& s = *c.snapshots;
  for (int i = 0; i < s.count; ++i)
    if (std::abs(t - (s.t_start + (s.t_stop - s.t_start) * i / (s.count - 1))) <= 1e-12) return true;
  return false;
}

/// Fraction of energy held in the outer fifth of the retained spectrum.
inline double spectral_tail_fraction(const Grid& g, const std::vector<ComplexArray>& u) {
  const double edge = 0.8 * g.k_max_retained();
  double tail = 0.0;
  double total = 0.0;
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    double a = 0.0;
    for (const auto& c : u) a += std::norm(c[mode]);
    a *= g.mode_weight()[mode];
    total += a;
    if (std::sqrt(g.k_squared()[mode]) > edge) tail += a;
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace detail

/// Integrates from the configured initial condition to t_end, recording the
/// diagnostic series at every sample time and (u, Q) at every snapshot time.
inline SimulationResult simulate(const SolverConfig& config) {
  validate(config);
  State state = initialize(config);
  const Grid& g = config.grid;
  std::vector<ComplexArray> u = state.u.coefficient_arrays();
  Integrator integrator(g, config.nu, config.nonlinear);

  SimulationResult result;
  result.series.dim = g.dim();
  result.series.nu = config.nu;
  result.series.m_max = config.m_max;
  result.trajectory.grid = g;
  result.trajectory.nu = config.nu;
  result.trajectory.seed = config.initial.seed;

  std::vector<double> sample_t;
  std::vector<double> sample_dissipation;  // ||Du||^2
  bool warned_tail = false;

  auto record = [&](double t) {
    const std::vector<double> sq = detail::sobolev_squares(g, u, config.m_max);
    DiagnosticSample s;
    s.t = t;
    s.l2 = std::sqrt(sq[0]);
    for (int m = 1; m <= config.m_max; ++m) s.dl2.push_back(std::sqrt(sq[m]));
    sample_t.push_back(t);
    sample_dissipation.push_back(sq[1]);
    s.criterion = smallness_criterion(3, config.nu, s.l2, s.dl2[0], config.gammas);
    s.sqrt_t_dl2 = std::sqrt(t) * s.dl2[0];
    result.series.samples.push_back(std::move(s));
    if (!warned_tail && detail::spectral_tail_fraction(g, u) > 1e-6) {
      warned_tail = true;
      result.warnings.push_back("under-resolved: more than 1e-6 of the energy sits in the outer "
                                "fifth of the retained spectrum at t = " + std::to_string(t));
    }
  };
  auto snapshot = [&](double t) {
    Field uf = Field::from_coefficients(g, u);
    std::vector<ComplexArray> q(g.dim(), ComplexArray(g.mode_count()));
    if (config.nonlinear) {
      integrator.rhs(u, q);
      for (auto& c : q)
        for (auto& v : c) v = -v;
    }
    result.trajectory.snapshots.push_back(Snapshot{t, std::move(uf), Field::from_coefficients(g, std::move(q))});
  };

  const std::vector<double> events = detail::event_times(config);
  const double dx = g.spacing();
  const double k_max = g.k_max_retained();
  double t = 0.0;
  std::size_t next = 0;
  double energy_prev = detail::sobolev_squares(g, u, 0)[0];
  while (next < events.size()) {
    if (std::abs(events[next] - t) <= 1e-12) {
      t = events[next];
      if (detail::is_sample_time(config, t)) record(t);
      if (detail::is_snapshot_time(config, t)) snapshot(t);
      ++next;
      continue;
    }
    double dt_max;
    const double umax = detail::max_abs_velocity(g, u);
    result.max_grid_reynolds = std::max(result.max_grid_reynolds, umax * dx / config.nu);
    if (config.dt > 0.0) {
      dt_max = config.dt;
    } else {
      dt_max = umax > 0.0 ? config.cfl * dx / umax : config.t_end;
      if (config.viscous_safety > 0.0 && k_max > 0.0)
        dt_max = std::min(dt_max, config.viscous_safety / (config.nu * k_max * k_max));
    }
    double h = std::min(dt_max, events[next] - t);
    // Avoid a sliver step just before an event.
    if (events[next] - t - h < 1e-9 * h) h = events[next] - t;
    integrator.step(u, h);
    ++result.steps;
    t = (std::abs(events[next] - (t + h)) <= 1e-12) ? events[next] : t + h;

    const double energy = detail::sobolev_squares(g, u, 0)[0];
    if (energy_prev > 0.0)
      result.worst_energy_increase =
          std::max(result.worst_energy_increase, std::sqrt(energy / energy_prev) - 1.0);
    energy_prev = energy;
    const Field uf = Field::from_coefficients(g, u);
    result.max_divergence_defect = std::max(result.max_divergence_defect, divergence_defect(uf));
  }

  // Energy-balance residual over [0, t_i] for every sample.
  auto& samples = result.series.samples;
  const double e0 = samples.front().l2 * samples.front().l2;
  for (std::size_t i = 1; i < samples.size() && e0 > 0.0; ++i) {
    double integral;
    if (i == 1 && samples.size() >= 3) {
      integral = detail::first_interval_integral(sample_t, sample_dissipation);
    } else {
      integral = integrate_samples(std::span(sample_t).first(i + 1),
                                   std::span(sample_dissipation).first(i + 1));
    }
    const double e = samples[i].l2 * samples[i].l2;
    samples[i].residual = std::abs(e + 2.0 * config.nu * integral - e0) / e0;
  }
  return result;
}

}  // namespace leray_lab
