#pragma once

#include "leray_lab/solver.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace leray_lab {

/// Relative slack for monotonicity checks: 1e-10 times the initial value.
inline constexpr double kMonotoneTolerance = 1e-10;

namespace detail {

inline std::size_t sample_index(const std::vector<double>& times, double t, const char* what) {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  throw InvalidArgument(std::string(what) + " is not a sample time of the series");
}

}  // namespace detail

/// |‖u(t)‖² + 2ν ∫_s^t ‖Du‖² dτ − ‖u(s)‖²| / ‖u(s)‖², the integral taken by
/// quadrature over the series samples in [s, t].
inline double energy_balance_residual(const DiagnosticsSeries& series, double s, double t,
                                      QuadratureRule rule = QuadratureRule::simpson) {
  if (t < s) throw InvalidArgument("energy balance needs s <= t");
  const std::vector<double> times = series.times();
  const std::size_t i0 = detail::sample_index(times, s, "s");
  const std::size_t i1 = detail::sample_index(times, t, "t");
  if (i0 == i1) return 0.0;
  const std::size_t needed = rule == QuadratureRule::simpson ? 3 : 2;
  if (i1 - i0 + 1 < needed) throw InvalidArgument("insufficient samples for quadrature");
  std::vector<double> tt;
  std::vector<double> diss;
  for (std::size_t i = i0; i <= i1; ++i) {
    tt.push_back(times[i]);
    diss.push_back(series.samples[i].dl2[0] * series.samples[i].dl2[0]);
  }
  const double e0 = series.samples[i0].l2 * series.samples[i0].l2;
  const double e1 = series.samples[i1].l2 * series.samples[i1].l2;
  if (e0 == 0.0) return 0.0;
  return std::abs(e1 + 2.0 * series.nu * integrate_samples(tt, diss, rule) - e0) / e0;
}

/// Earliest time T among samples that have a successor such that the values
/// are nonincreasing (up to tol) from T to the end; nullopt if none.
/// A negative tol selects 1e-10 times the first value.
inline std::optional<double> monotone_onset(const std::vector<double>& times,
                                            const std::vector<double>& values, double tol = -1.0) {
  if (times.size() != values.size()) throw InvalidArgument("times and values differ in length");
  if (values.size() < 2) return std::nullopt;
  if (tol < 0.0) tol = kMonotoneTolerance * std::abs(values.front());
  std::size_t onset = values.size() - 1;
  while (onset > 0 && values[onset] <= values[onset - 1] + tol) --onset;
  if (onset == values.size() - 1) return std::nullopt;
  return times[onset];
}

inline std::optional<double> monotone_onset(const DiagnosticsSeries& series, int m,
                                            double tol = -1.0) {
  return monotone_onset(series.times(), series.norms(m), tol);
}

struct CriterionTrace {
  int criterion_dim = 3;
  bool illustrative = false;  // criterion dimension differs from the run dimension
  std::vector<double> times;
  std::vector<bool> flags;
  std::optional<double> first_true;
  bool reverted = false;  // some true sample followed by a false one
  std::size_t flips = 0;  // false -> true transitions
};

/// Per-sample smallness criterion for dimension `dim` (3 or 4) evaluated on
/// the series norms.
inline CriterionTrace criterion_trace(const DiagnosticsSeries& series, double nu, int dim,
                                      const GammaConstants& gammas = computed_constants()) {
  CriterionTrace trace;
  trace.criterion_dim = dim;
  trace.illustrative = dim != series.dim;
  bool seen_true = false;
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    const auto& s = series.samples[i];
    const bool flag = smallness_criterion(dim, nu, s.l2, s.dl2.at(0), gammas);
    if (flag && !trace.first_true) trace.first_true = s.t;
    if (i > 0 && flag && !trace.flags.back()) ++trace.flips;
    if (seen_true && !flag) trace.reverted = true;
    seen_true = seen_true || flag;
    trace.times.push_back(s.t);
    trace.flags.push_back(flag);
  }
  return trace;
}

/// Relative L² error of the Duhamel reconstruction of u(t) from u(t0) and the
/// stored Q snapshots on [t0, t]. `stride` keeps every stride-th snapshot.
inline double duhamel_residual(const TrajectoryStore& traj, double t0, double t, int stride = 1,
                               QuadratureRule rule = QuadratureRule::simpson) {
  if (!(t0 < t)) throw InvalidArgument("Duhamel check needs t0 < t");
  if (stride < 1) throw InvalidArgument("snapshot stride must be positive");
  std::vector<const Snapshot*> window;
  for (const auto& s : traj.snapshots)
    if (s.time >= t0 - 1e-12 && s.time <= t + 1e-12) window.push_back(&s);
  if (window.empty() || std::abs(window.front()->time - t0) > 1e-12 ||
      std::abs(window.back()->time - t) > 1e-12)
    throw InvalidArgument("trajectory lacks snapshots at t0 and t");
  if ((window.size() - 1) % stride != 0)
    throw InvalidArgument("snapshot stride does not divide the window");
  std::vector<const Snapshot*> used;
  for (std::size_t i = 0; i < window.size(); i += stride) used.push_back(window[i]);
  const std::size_t needed = rule == QuadratureRule::simpson ? 3 : 2;
  if (used.size() < std::max<std::size_t>(needed, 3))
    throw InvalidArgument("insufficient snapshot density for the Duhamel quadrature");

  const Grid& g = traj.grid;
  for (const Snapshot* s : used)
    if (!(s->u.grid() == g) || !(s->q.grid() == g))
      throw InvalidArgument("snapshot grid differs from trajectory grid");
  std::vector<double> times;
  for (const Snapshot* s : used) times.push_back(s->time);
  const std::vector<double> w = quadrature_weights(times, rule);

  const auto& k2 = g.k_squared();
  const auto& mw = g.mode_weight();
  const Snapshot& first = *used.front();
  const Snapshot& last = *used.back();
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t c = 0; c < first.u.components(); ++c) {
    auto u0 = first.u.coefficients(c);
    auto u1 = last.u.coefficients(c);
    for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
      const double decay = traj.nu * k2[mode];
      Complex rhs = std::exp(-decay * (t - t0)) * u0[mode];
      for (std::size_t j = 0; j < used.size(); ++j)
        rhs -= w[j] * std::exp(-decay * (t - times[j])) * used[j]->q.coefficients(c)[mode];
      err += mw[mode] * std::norm(u1[mode] - rhs);
      ref += mw[mode] * std::norm(u1[mode]);
    }
  }
  if (ref == 0.0) return std::sqrt(err);
  return std::sqrt(err / ref);
}

struct DecayReport {
  double decade_start = 0.0;
  double decade_end = 0.0;
  double sqrt_t_dl2_start = 0.0;
  double sqrt_t_dl2_end = 0.0;
  double l2_start = 0.0;
  double l2_end = 0.0;
  bool sqrt_t_dl2_decreasing = false;
  bool l2_decreasing = false;
  bool passed() const { return sqrt_t_dl2_decreasing && l2_decreasing; }
};

/// Trends of t^{1/2}‖Du‖ and ‖u‖ over the final decade [t_end/10, t_end].
inline DecayReport decay_diagnostics(const DiagnosticsSeries& series) {
  if (series.samples.size() < 3) throw InvalidArgument("horizon too short: fewer than 3 samples");
  const double t_end = series.samples.back().t;
  const double start = t_end / 10.0;
  std::size_t i0 = series.samples.size();
  for (std::size_t i = 0; i < series.samples.size(); ++i)
    if (series.samples[i].t > 0.0 && series.samples[i].t <= start + 1e-12) i0 = i;
  if (i0 == series.samples.size() || i0 + 2 > series.samples.size())
    throw InvalidArgument("horizon too short: series does not span a decade of positive times");
  DecayReport r;
  r.decade_start = series.samples[i0].t;
  r.decade_end = t_end;
  r.sqrt_t_dl2_start = series.samples[i0].sqrt_t_dl2;
  r.sqrt_t_dl2_end = series.samples.back().sqrt_t_dl2;
  r.l2_start = series.samples[i0].l2;
  r.l2_end = series.samples.back().l2;
  const double tol_a = kMonotoneTolerance * r.sqrt_t_dl2_start;
  const double tol_b = kMonotoneTolerance * series.samples.front().l2;
  r.sqrt_t_dl2_decreasing = r.sqrt_t_dl2_end < r.sqrt_t_dl2_start;
  r.l2_decreasing = r.l2_end < r.l2_start;
  for (std::size_t i = i0 + 1; i < series.samples.size(); ++i) {
    const auto& a = series.samples[i - 1];
    const auto& b = series.samples[i];
    if (b.sqrt_t_dl2 > a.sqrt_t_dl2 + tol_a) r.sqrt_t_dl2_decreasing = false;
    if (b.l2 > a.l2 + tol_b) r.l2_decreasing = false;
  }
  return r;
}

}  // namespace leray_lab
