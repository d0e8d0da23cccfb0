#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "twofluid/diagnostics.hpp"
#include "twofluid/ins_reference.hpp"
#include "twofluid/presets.hpp"

using namespace twofluid;
using namespace twofluid::diagnostics;
using testing_support::rel_err;
using testing_support::Uniform;

namespace {

const double kPi = std::numbers::pi;
const closure::Gammas kGammas(2.0, 3.0);

FieldState uniform(const GridPtr& g) {
  return FieldState{0.0, ScalarField(g, 1.0), ScalarField(g, 1.0), VectorField(g)};
}

// R, Q within 0.1 of 1 and a bounded velocity, from random point values.
FieldState random_state(const GridPtr& g, std::uint64_t seed) {
  Uniform rng(seed);
  FieldState s = uniform(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    s.R[i] += rng(-0.1, 0.1);
    s.Q[i] += rng(-0.1, 0.1);
    for (auto& c : s.u) c[i] = rng(-1.0, 1.0);
  }
  return s;
}

FieldState swap_phases(FieldState s) {
  std::swap(s.R, s.Q);
  return s;
}

}  // namespace

TEST(EnergyEs, Examples) {
  const auto g1 = make_grid(1, 16);
  EXPECT_EQ(energy_E_s(uniform(g1), 3, 0.1), 0.0);
  FieldState s = uniform(g1);
  s.u[0] = ScalarField::from_function(g1, [](std::span<const double> x) { return std::sin(x[0]); });
  for (double eps : {1.0, 0.3}) EXPECT_NEAR(energy_E_s(s, 0, eps), 0.5 * kPi, 1e-13);
}

TEST(EnergyEs, WellPreparedDataFromProfiles) {
  const auto g = make_grid(2, 32);
  const double eps = 0.2, delta0 = 0.5;
  const auto u0 = presets::taylor_green_perturbed(g);
  const auto st = well_prepared_init(u0, delta0, eps, 4, 2);
  // Unit-norm density profiles contribute eps^-2 (eps^2 delta0)^2 each.
  const double expected = 0.5 * (2.0 * eps * eps * delta0 * delta0 + field::sobolev_norm_squared(st.u, 2));
  EXPECT_LE(rel_err(energy_E_s(st, 2, eps), expected), 1e-10);
}

TEST(EnergyFs, ConstantStateAndWeights) {
  const auto g = make_grid(2, 8);
  const auto F = energy_F_s(uniform(g), 2, 0.5, closure::Gammas(2.0, 2.0));
  EXPECT_EQ(F.value, 0.0);
  // gamma = 1, gamma_+ = 2 at (1, 1): 2 * 2 * 1 / 1 = 4.
  EXPECT_DOUBLE_EQ(F.weight_max, 4.0);
  EXPECT_DOUBLE_EQ(F.weight_min, 1.0);
}

TEST(EnergyFs, SandwichedByWeightExtremes) {
  for (const auto& g : {closure::Gammas(2.0, 3.0), closure::Gammas(1.4, 2.0), closure::Gammas(3.0, 1.5)}) {
    for (int seed = 0; seed < 5; ++seed) {
      const auto grid = make_grid(2, 16);
      const auto st = random_state(grid, 100 + seed);
      for (int s : {0, 1, 2}) {
        const double E = energy_E_s(st, s, 0.3);
        const auto F = energy_F_s(st, s, 0.3, g);
        EXPECT_LE(F.weight_min * E, F.value * (1 + 1e-12));
        EXPECT_LE(F.value, F.weight_max * E * (1 + 1e-12));
      }
    }
  }
}

TEST(EnergyFs, ZerothOrderIsPointwiseWeighted) {
  const auto g = make_grid(1, 8);
  FieldState st = uniform(g);
  st.R += 0.05;
  const auto j = closure::jet(1.05, 1.0, kGammas);
  const double eps = 0.5;
  const double expected = 0.5 * (j.dpdR / 1.05) * 0.05 * 0.05 / (eps * eps) * 2.0 * kPi;
  EXPECT_LE(rel_err(energy_F_s(st, 0, eps, kGammas).value, expected), 1e-13);
}

TEST(RelativeEnergyTest, ZeroOnlyAtTheTarget) {
  const auto g = make_grid(2, 16);
  const closure::RelativeEnergy b(kGammas);
  FieldState st = uniform(g);
  st.u = presets::taylor_green(g);
  EXPECT_NEAR(relative_energy(st, st.u, 0.2, b, 0.0), 0.0, 1e-12);
  FieldState off = st;
  off.u[0][7] += 1e-3;
  EXPECT_GT(relative_energy(off, st.u, 0.2, b, 0.0), 1e-12);
  off = st;
  off.R[3] += 1e-3;
  EXPECT_GT(relative_energy(off, st.u, 0.2, b, 0.0), 1e-12);
}

TEST(RelativeEnergyTest, UniformDensityExcessIsQuadraticBregman) {
  const auto g = make_grid(2, 16);
  const double h = 1e-3, eps = 0.25;
  FieldState st = uniform(g);
  st.R += h;
  const closure::RelativeEnergy b(kGammas);
  const double value = relative_energy(st, VectorField(g), eps, b, 0.0);
  const double volume = g->volume();
  EXPECT_LE(rel_err(value, b(1.0 + h, 1.0) * volume / (eps * eps)), 1e-12);
  const double k = 1e-3;
  auto e = [&](double r) { return closure::internal_energy_density(r, 1.0, kGammas); };
  const double e_rr = (e(1.0 + k) - 2.0 * e(1.0) + e(1.0 - k)) / (k * k);
  EXPECT_LE(rel_err(value, 0.5 * e_rr * h * h * volume / (eps * eps)), 1e-2);
}

TEST(RelativeEnergyTest, InvariantUnderPhaseRelabeling) {
  const auto g = make_grid(2, 16);
  const auto st = random_state(g, 3);
  const auto ref = presets::taylor_green(g);
  for (const auto& gm : {closure::Gammas(2.0, 3.0), closure::Gammas(1.4, 2.0)}) {
    const double a = relative_energy(st, ref, 0.3, closure::RelativeEnergy(gm), 0.7);
    const double b = relative_energy(swap_phases(st), ref, 0.3, closure::RelativeEnergy(gm.swapped()), 0.7);
    EXPECT_LE(rel_err(b, a), 1e-12);
    const auto Fa = energy_F_s(st, 2, 0.3, gm);
    const auto Fb = energy_F_s(swap_phases(st), 2, 0.3, gm.swapped());
    EXPECT_LE(rel_err(Fb.value, Fa.value), 1e-12);
  }
}

TEST(DissipationRate, Example) {
  const auto g = make_grid(2, 16);
  const auto ref = presets::taylor_green(g);
  VectorField u = ref;
  u[0] += ScalarField::from_function(g, [](std::span<const double> x) { return std::sin(x[0]); });
  const double two_pi2 = 2.0 * kPi * kPi;
  EXPECT_NEAR(dissipation_rate(u, ref, 0.1, 0.05), 0.1 * two_pi2 + 0.15 * two_pi2, 1e-12);
}

TEST(RateNormsTest, IdenticalStatesGiveZero) {
  const auto g = make_grid(2, 16);
  FieldState st = uniform(g);
  st.u = presets::taylor_green_perturbed(g);
  const auto r = rate_norms(st, st.u, 2);
  EXPECT_EQ(r.R_Hs, 0.0);
  EXPECT_EQ(r.Q_Hs, 0.0);
  EXPECT_EQ(r.RQ_Hs_sq, 0.0);
  EXPECT_EQ(r.u_L2_sq, 0.0);
  EXPECT_EQ(r.u_H1_sq, 0.0);
  EXPECT_LE(r.div_Hs1, 1e-13);
  EXPECT_EQ(r.div_diff_Hs1, 0.0);
}

TEST(RateNormsTest, GradientPerturbationScalesLinearly) {
  const auto g = make_grid(2, 32);
  const auto ref = presets::taylor_green_perturbed(g);
  const auto phi = ScalarField::from_function(g, [](std::span<const double> x) {
    return std::cos(x[0] - 2.0 * x[1]) + 0.5 * std::sin(3.0 * x[1]);
  });
  const double target = field::sobolev_norm(field::laplacian(phi), 1);
  for (double eps : {0.4, 0.1}) {
    FieldState st = uniform(g);
    st.u = ref;
    st.u.add_scaled(field::gradient(phi), eps);
    const auto r = rate_norms(st, ref, 2);
    EXPECT_LE(rel_err(r.div_Hs1, eps * target), 1e-12);
    EXPECT_LE(std::abs(r.div_Hs1 - r.div_diff_Hs1), 1e-12);
  }
}

TEST(Trapezoid, AccumulatesAndRestores) {
  TrapezoidAccumulator a;
  a.add(0.0, 1.0);
  a.add(0.5, 3.0);
  a.add(1.0, 3.0);
  EXPECT_DOUBLE_EQ(a.total(), 0.5 * 0.5 * 4.0 + 0.5 * 0.5 * 6.0);
  TrapezoidAccumulator b(a.total(), a.last_t(), a.last_value(), a.started());
  a.add(2.0, 0.0);
  b.add(2.0, 0.0);
  EXPECT_EQ(a.total(), b.total());
}

TEST(RunDiagnosticsTest, EntriesNonNegativeAlongRun) {
  const auto g = make_grid(2, 16);
  const double eps = 0.3;
  const PhysParams p{kGammas, 0.1, 0.0, eps, nullptr};
  const auto u0 = presets::taylor_green_perturbed(g);
  auto st = well_prepared_init(u0, 0.5, eps, 1, 2);
  RunDiagnostics diag(kGammas, p.mu, p.lambda, eps, 2);
  ins::InsState ref{0.0, u0};
  const double dt = stable_dt(st, p, 0.5);
  double last_h1 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto r = diag.observe(st, ref.u);
    for (double v : {r.E_s, r.F_s, r.rel_energy, r.visc_dissipation, r.rate_R, r.rate_Q, r.rate_RQ_sq,
                     r.rate_u_L2, r.rate_u_H1_int, r.rate_div, r.total_energy}) {
      ASSERT_GE(v, 0.0);
    }
    EXPECT_GE(r.rate_u_H1_int, last_h1);
    EXPECT_LE(r.F_weight_min * r.E_s, r.F_s * (1 + 1e-12));
    EXPECT_LE(r.F_s, r.F_weight_max * r.E_s * (1 + 1e-12));
    last_h1 = r.rate_u_H1_int;
    st = step_rk4(st, p, dt);
    ref = ins::step_rk4(ref, p.mu, dt);
  }
}
