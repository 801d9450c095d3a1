#include "leray_lab/leray_lab.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace leray_lab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_abs(const Field& f) {
  const Field p = with_physical(f);
  double m = 0.0;
  for (std::size_t c = 0; c < p.components(); ++c)
    for (double v : p.samples(c)) m = std::max(m, std::abs(v));
  return m;
}

double max_diff(const Field& a, const Field& b) {
  const Field pa = with_physical(a);
  const Field pb = with_physical(b);
  double m = 0.0;
  for (std::size_t c = 0; c < pa.components(); ++c)
    for (std::size_t i = 0; i < pa.samples(c).size(); ++i)
      m = std::max(m, std::abs(pa.samples(c)[i] - pb.samples(c)[i]));
  return m;
}

std::size_t find_mode(const Grid& g, std::initializer_list<int> m) {
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    bool hit = true;
    int a = 0;
    for (int v : m) hit = hit && g.mode_index(a++)[mode] == v;
    if (hit) return mode;
  }
  return g.mode_count();
}

Field random_field(const Grid& g, std::uint64_t seed, std::size_t components = 0) {
  Rng rng(seed);
  return random_band_limited_field(g, rng, g.resolution() / 4, 1.0,
                                   components ? components : g.dim());
}

}  // namespace

TEST(Grid, TwoDimensional64) {
  const Grid g = make_grid(2, 64, kTwoPi);
  EXPECT_EQ(g.sample_count(), 64u * 64u);
  EXPECT_EQ(g.mode_count(), 64u * 33u);
  EXPECT_DOUBLE_EQ(g.wavenumber_unit(), 1.0);
  EXPECT_DOUBLE_EQ(g.spacing(), kTwoPi / 64);
}

TEST(Grid, SmallestFourDimensional) {
  const Grid g = make_grid(4, 16, kTwoPi);
  EXPECT_EQ(g.sample_count(), 16u * 16u * 16u * 16u);
}

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(make_grid(3, 7, kTwoPi), InvalidArgument);
  EXPECT_THROW(make_grid(5, 8, kTwoPi), InvalidArgument);
  EXPECT_THROW(make_grid(1, 8, kTwoPi), InvalidArgument);
  EXPECT_THROW(make_grid(2, 4, kTwoPi), InvalidArgument);
  EXPECT_THROW(make_grid(2, 8, 0.0), InvalidArgument);
  EXPECT_THROW(make_grid(2, 8, kTwoPi, 0.0), InvalidArgument);
}

TEST(Grid, WavenumbersOnSymmetricLattice) {
  const Grid g = make_grid(3, 8, 4.0 * std::numbers::pi);
  for (int a = 0; a < 3; ++a)
    for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
      const int m = g.mode_index(a)[mode];
      EXPECT_GE(m, -4);
      EXPECT_LE(m, 3);
      const double expected = m == -4 ? 0.0 : 0.5 * m;  // Nyquist carries no derivative
      EXPECT_DOUBLE_EQ(g.wavevector(a)[mode], expected);
    }
}

TEST(Transform, ZeroFieldStaysZero) {
  const Grid g = make_grid(2, 16, kTwoPi);
  const Field z(g, 2, Representation::physical);
  const Field s = transform(z, Direction::forward);
  for (std::size_t c = 0; c < 2; ++c)
    for (auto v : s.coefficients(c)) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(Transform, SineIsOneConjugatePair) {
  const Grid g = make_grid(2, 16, kTwoPi);
  const Field u = sample_field(g, 2, [](auto x, auto out) {
    out[0] = std::sin(x[0]);
    out[1] = 0.0;
  });
  const Field s = transform(u, Direction::forward);
  const std::size_t plus = find_mode(g, {1, 0});
  const std::size_t minus = find_mode(g, {-1, 0});
  // sin x = (e^{ix} - e^{-ix}) / (2i)
  EXPECT_NEAR(std::abs(s.coefficients(0)[plus] - Complex(0, -0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.coefficients(0)[minus] - Complex(0, 0.5)), 0.0, 1e-15);
  double other = 0.0;
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode)
    if (mode != plus && mode != minus) other = std::max(other, std::abs(s.coefficients(0)[mode]));
  EXPECT_LT(other, 1e-15);
}

TEST(Transform, MatchesDirectDft) {
  // Independent O(N^4) DFT on an 8x8 grid.
  const Grid g = make_grid(2, 8, kTwoPi);
  Rng rng(3);
  std::normal_distribution<double> gauss;
  RealArray f(g.sample_count());
  for (auto& v : f) v = gauss(rng);
  const Field s = transform(Field::from_samples(g, {f}), Direction::forward);
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    const int m0 = g.mode_index(0)[mode];
    const int m1 = g.mode_index(1)[mode];
    Complex ref{};
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        ref += f[i * 8 + j] * std::exp(Complex(0, -kTwoPi * (m0 * i + m1 * j) / 8.0));
    ref /= 64.0;
    EXPECT_NEAR(std::abs(s.coefficients(0)[mode] - ref), 0.0, 1e-14);
  }
}

TEST(Transform, RoundTripRandomField) {
  for (int dim : {2, 3, 4}) {
    const Grid g = make_grid(dim, dim == 4 ? 8 : 16, kTwoPi);
    const Field u = with_physical(random_field(g, 11 + dim));
    const Field back = transform(transform(Field::from_samples(g, u.sample_arrays()), Direction::forward),
                                 Direction::inverse);
    EXPECT_LE(max_diff(u, Field::from_samples(g, back.sample_arrays())), 1e-12 * max_abs(u));
    EXPECT_LE(conjugate_symmetry_defect(with_spectral(u)), 1e-12);
  }
}

TEST(Field, RejectsMismatchedArrays) {
  const Grid g = make_grid(2, 8, kTwoPi);
  EXPECT_THROW(Field::from_samples(g, {RealArray(10)}), InvalidArgument);
  EXPECT_THROW(Field::from_coefficients(g, {ComplexArray(10)}), InvalidArgument);
}

TEST(LerayProject, AnnihilatesGradients) {
  const Grid g = make_grid(3, 16, kTwoPi);
  // grad of phi = sin(x) cos(2y) + cos(3z)
  const Field grad = sample_field(g, 3, [](auto x, auto out) {
    out[0] = std::cos(x[0]) * std::cos(2 * x[1]);
    out[1] = -2 * std::sin(x[0]) * std::sin(2 * x[1]);
    out[2] = -3 * std::sin(3 * x[2]);
  });
  EXPECT_LT(max_abs(leray_project(grad)), 1e-14);
}

TEST(LerayProject, FixesDivergenceFreeFields) {
  const Grid g = make_grid(2, 32, kTwoPi);
  const Field tg = with_spectral(detail::taylor_green_field(g, 1.0));
  EXPECT_LE(max_diff(leray_project(tg), tg), 1e-14 * max_abs(tg));
}

TEST(LerayProject, HandComputedMode) {
  const Grid g = make_grid(2, 16, kTwoPi);
  std::vector<ComplexArray> c(2, ComplexArray(g.mode_count()));
  const std::size_t k0 = find_mode(g, {1, 0});
  c[0][k0] = 1.0;
  c[1][k0] = 1.0;
  const Field p = leray_project(Field::from_coefficients(g, c));
  EXPECT_NEAR(std::abs(p.coefficients(0)[k0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.coefficients(1)[k0] - Complex(1.0)), 0.0, 1e-15);
}

TEST(LerayProject, MeanModeUntouched) {
  const Grid g = make_grid(2, 8, kTwoPi);
  const Field u = sample_field(g, 2, [](auto, auto out) {
    out[0] = 2.0;
    out[1] = -1.0;
  });
  EXPECT_LE(max_diff(leray_project(u), u), 1e-15);
}

TEST(LerayProject, IdempotentOrthogonalDivergenceFree) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Grid g = make_grid(seed % 2 ? 3 : 2, 16, kTwoPi);
    const Field u = random_field(g, seed);
    const Field p = leray_project(u);
    const double nu = dm_l2_norm(u, 0);
    std::vector<ComplexArray> diff = u.coefficient_arrays();
    for (std::size_t c = 0; c < diff.size(); ++c)
      for (std::size_t k = 0; k < g.mode_count(); ++k) diff[c][k] -= p.coefficients(c)[k];
    const Field rest = Field::from_coefficients(g, diff);
    EXPECT_LE(max_diff(leray_project(p), p), 1e-13 * nu);
    EXPECT_LE(std::abs(l2_inner(p, rest)), 1e-12 * nu * nu);
    EXPECT_LE(divergence_defect(p), 1e-12);
    EXPECT_LE(conjugate_symmetry_defect(p), 1e-12);
  }
}

TEST(Derivative, ConstantGivesZero) {
  const Grid g = make_grid(2, 8, kTwoPi);
  const Field u = sample_field(g, 1, [](auto, auto out) { out[0] = 3.0; });
  EXPECT_LT(max_abs(derivative(u, {0})), 1e-15);
}

TEST(Derivative, SineToCosine) {
  const Grid g = make_grid(2, 32, kTwoPi);
  const Field u = sample_field(g, 1, [](auto x, auto out) { out[0] = std::sin(x[0]); });
  const Field ref = sample_field(g, 1, [](auto x, auto out) { out[0] = std::cos(x[0]); });
  EXPECT_LT(max_diff(derivative(u, {0}), ref), 1e-14);
}

TEST(Derivative, MixedSecondOrder) {
  const Grid g = make_grid(2, 32, kTwoPi);
  const Field u = sample_field(g, 1, [](auto x, auto out) { out[0] = std::sin(x[0]) * std::sin(x[1]); });
  const Field ref = sample_field(g, 1, [](auto x, auto out) { out[0] = std::cos(x[0]) * std::cos(x[1]); });
  EXPECT_LT(max_diff(derivative(u, {0, 1}), ref), 1e-13);
  EXPECT_LT(max_diff(derivative(u, {1, 0}), ref), 1e-13);
}

TEST(Derivative, HigherOrderOnOtherBox) {
  // L = 4 pi: D_y^3 cos(y/2 * 3) = (3/2)^3 sin(3y/2)
  const Grid g = make_grid(2, 32, 4.0 * std::numbers::pi);
  const Field u = sample_field(g, 1, [](auto x, auto out) { out[0] = std::cos(1.5 * x[1]); });
  const Field ref = sample_field(g, 1, [](auto x, auto out) { out[0] = 3.375 * std::sin(1.5 * x[1]); });
  EXPECT_LT(max_diff(derivative(u, {1, 1, 1}), ref), 1e-12);
}

TEST(Derivative, RejectsBadAxes) {
  const Grid g = make_grid(2, 8, kTwoPi);
  const Field u(g, 1);
  EXPECT_THROW(derivative(u, {2}), InvalidArgument);
  EXPECT_THROW(derivative(u, {-1}), InvalidArgument);
  EXPECT_THROW(derivative(u, std::span<const int>{}), InvalidArgument);
}

TEST(HeatSemigroup, ZeroTimeIsIdentity) {
  const Grid g = make_grid(2, 16, kTwoPi);
  const Field u = random_field(g, 4);
  EXPECT_LT(max_diff(heat_semigroup(u, 0.3, 0.0), u), 1e-15);
}

TEST(HeatSemigroup, SingleModeDecay) {
  const Grid g = make_grid(2, 16, kTwoPi);
  const Field u = sample_field(g, 1, [](auto x, auto out) { out[0] = 2.0 * std::sin(x[1]); });
  const Field ref = sample_field(g, 1, [](auto x, auto out) { out[0] = 2.0 * std::exp(-1.0) * std::sin(x[1]); });
  EXPECT_LT(max_diff(heat_semigroup(u, 1.0, 1.0), ref), 1e-15);
}

TEST(HeatSemigroup, SemigroupLawAndDecay) {
  const Grid g = make_grid(3, 16, kTwoPi);
  const Field u = random_field(g, 9);
  Rng rng(2);
  std::uniform_real_distribution<double> U(0.0, 0.2);
  for (int trial = 0; trial < 10; ++trial) {
    const double nu = 0.01 + U(rng);
    const double t1 = U(rng);
    const double t2 = U(rng);
    const Field a = heat_semigroup(heat_semigroup(u, nu, t1), nu, t2);
    const Field b = heat_semigroup(u, nu, t1 + t2);
    EXPECT_LE(max_diff(a, b), 1e-13 * max_abs(u));
    EXPECT_LE(dm_l2_norm(b, 0), dm_l2_norm(heat_semigroup(u, nu, t1), 0) * (1 + 1e-15));
  }
}

TEST(HeatSemigroup, RejectsNegativeTime) {
  const Grid g = make_grid(2, 8, kTwoPi);
  EXPECT_THROW(heat_semigroup(Field(g, 2), 1.0, -0.1), InvalidArgument);
  EXPECT_THROW(heat_semigroup(Field(g, 2), 0.0, 0.1), InvalidArgument);
}

TEST(NonlinearTerm, ZeroAndUniformFields) {
  const Grid g = make_grid(3, 16, kTwoPi);
  EXPECT_EQ(max_abs(nonlinear_term(Field(g, 3))), 0.0);
  const Field c = sample_field(g, 3, [](auto, auto out) {
    out[0] = 1.0;
    out[1] = -2.0;
    out[2] = 0.5;
  });
  EXPECT_LT(max_abs(nonlinear_term(c)), 1e-14);
}

TEST(NonlinearTerm, TaylorGreenIsPureGradient) {
  const Grid g = make_grid(2, 64, kTwoPi);
  const Field tg = detail::taylor_green_field(g, 1.0);
  EXPECT_LT(max_abs(nonlinear_term(tg)), 1e-14);
}

TEST(NonlinearTerm, HandDerivedProjection) {
  // u = (sin 2y, sin x): (u.grad)u = (2 sin x cos 2y, cos x sin 2y), whose
  // solenoidal part has stream function (3/5) sin x sin 2y.
  const Grid g = make_grid(2, 32, kTwoPi);
  const Field u = sample_field(g, 2, [](auto x, auto out) {
    out[0] = std::sin(2 * x[1]);
    out[1] = std::sin(x[0]);
  });
  const Field ref = sample_field(g, 2, [](auto x, auto out) {
    out[0] = 1.2 * std::sin(x[0]) * std::cos(2 * x[1]);
    out[1] = -0.6 * std::cos(x[0]) * std::sin(2 * x[1]);
  });
  EXPECT_LT(max_diff(nonlinear_term(u), ref), 1e-14);
}

TEST(NonlinearTerm, DivergenceFreeAndDealiased) {
  const Grid g = make_grid(3, 16, kTwoPi);
  const Field u = dealias(leray_project(random_field(g, 5)));
  const Field q = nonlinear_term(u);
  EXPECT_LE(divergence_defect(q), 1e-12);
  EXPECT_LE(conjugate_symmetry_defect(q), 1e-12);
  const auto& keep = g.dealias_mask();
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t mode = 0; mode < g.mode_count(); ++mode)
      if (!keep[mode]) {
        EXPECT_EQ(std::abs(q.coefficients(c)[mode]), 0.0);
      }
}

TEST(NonlinearTerm, EnergyNeutral) {
  // <Q(u), u> = 0 for solenoidal u; the dealiased product keeps this exactly.
  const Grid g = make_grid(3, 16, kTwoPi);
  const Field u = dealias(leray_project(random_field(g, 8)));
  const Field q = nonlinear_term(u);
  EXPECT_LE(std::abs(l2_inner(q, u)), 1e-12 * dm_l2_norm(q, 0) * dm_l2_norm(u, 0));
}
