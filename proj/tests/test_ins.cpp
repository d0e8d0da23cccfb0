#include <gtest/gtest.h>

#include <cmath>

#include "scenarios.hpp"
#include "support.hpp"
#include "twofluid/ins_reference.hpp"
#include "twofluid/presets.hpp"

using namespace twofluid;
using testing_support::Uniform;

namespace {

VectorField random_vector(const GridPtr& g, std::uint64_t seed) {
  Uniform rng(seed);
  std::vector<ScalarField> c;
  for (int d = 0; d < g->dim(); ++d) {
    ScalarField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng(-1.0, 1.0);
    c.push_back(f);
  }
  return VectorField(std::move(c));
}

VectorField band_limited_vector(const GridPtr& g, std::uint64_t seed) {
  presets::UniformStream rng(seed);
  return presets::random_vector_profile(g, rng, 0);
}

}  // namespace

TEST(Leray, IdempotentOnSolenoidalFields) {
  const auto g = make_grid(2, 32);
  const auto u = presets::taylor_green_perturbed(g);
  EXPECT_LE((ins::leray_project(u) - u).max_norm(), 1e-14);
}

TEST(Leray, AnnihilatesGradients) {
  const auto g = make_grid(3, 16);
  const auto phi = ScalarField::from_function(g, [](std::span<const double> x) {
    return std::sin(x[0] + 2.0 * x[1]) * std::cos(x[2]);
  });
  EXPECT_LE(ins::leray_project(field::gradient(phi)).max_norm(), 1e-13);
}

TEST(Leray, MatchesCompositionOfPrimitives) {
  for (int dim : {2, 3}) {
    const auto g = make_grid(dim, 16);
    const auto v = band_limited_vector(g, 3 + dim);
    const auto oracle = v - field::gradient(field::inverse_laplacian(field::divergence(v)));
    EXPECT_LE((ins::leray_project(v) - oracle).max_norm(), 1e-12);
  }
}

TEST(Leray, ProjectorProperties) {
  for (int dim : {2, 3}) {
    const auto g = make_grid(dim, dim == 2 ? 32 : 8);
    const auto v = random_vector(g, 17 + dim);
    const auto pv = ins::leray_project(v);
    EXPECT_LE((ins::leray_project(pv) - pv).max_norm(), 1e-12);
    EXPECT_LE(field::divergence(pv).max_abs(), 1e-12);
    Uniform rng(99);
    ScalarField phi(g);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = rng(-1.0, 1.0);
    EXPECT_LE(std::abs(field::inner(pv, field::gradient(phi))), 1e-12);
  }
}

TEST(RhsIns, TrivialStates) {
  const auto g = make_grid(2, 16);
  EXPECT_EQ(ins::rhs_ins({0.0, VectorField(g)}, 0.1).max_norm(), 0.0);
  EXPECT_LE(ins::rhs_ins({0.0, VectorField(g, 0.4)}, 0.1).max_norm(), 1e-15);
}

TEST(RhsIns, TaylorGreenDecaysAtViscousRate) {
  const auto g = make_grid(2, 32);
  const double mu = 0.1;
  const auto u = presets::taylor_green(g);
  VectorField expected = u;
  expected *= -mu;
  EXPECT_LE((ins::rhs_ins({0.0, u}, mu) - expected).max_norm(), 1e-13);
}

TEST(RhsIns, TaylorGreenPressure) {
  const auto g = make_grid(2, 32);
  const auto pi = ins::pressure(presets::taylor_green(g));
  const auto exact = ScalarField::from_function(g, [](std::span<const double> x) {
    return 0.25 * (std::cos(2.0 * x[0]) + std::cos(2.0 * x[1]));
  });
  EXPECT_LE((pi - exact).max_abs(), 1e-14);
  EXPECT_NEAR(field::integrate(ins::pressure(presets::taylor_green_perturbed(g))), 0.0, 1e-12);
}

TEST(StepIns, TaylorGreenAnalyticDecay) {
  const auto r = scenarios::taylor_green_decay(16, 0.1, 1e-3, 200);
  EXPECT_LE(r.relative_l2_error, 1e-6);
  EXPECT_LE(r.max_divergence, 1e-10);
  EXPECT_TRUE(r.energy_monotone);
}

TEST(StepIns, DivergenceStaysSmallOverLongRun) {
  const auto g = make_grid(2, 16);
  ins::InsState s{0.0, presets::taylor_green_perturbed(g)};
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    s = ins::step_rk4(s, 0.1, 2e-3);
    if (i % 10 == 9) worst = std::max(worst, field::divergence(s.u).max_abs());
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(StepIns, EnergyBalance) {
  const auto g = make_grid(2, 64);
  const double mu = 0.1, dt = 2e-3;
  const int steps = 250;
  ins::InsState s{0.0, presets::taylor_green_perturbed(g)};
  const double ke0 = ins::kinetic_energy(s.u);
  // d/dt KE = -mu * (1/2)||grad u||^2 = -mu * enstrophy; Simpson in time.
  std::vector<double> rate{mu * ins::enstrophy(s.u)};
  for (int i = 0; i < steps; ++i) {
    s = ins::step_rk4(s, mu, dt);
    rate.push_back(mu * ins::enstrophy(s.u));
  }
  double dissipated = rate.front() + rate.back();
  for (int i = 1; i < steps; ++i) dissipated += (i % 2 ? 4.0 : 2.0) * rate[i];
  dissipated *= dt / 3.0;
  const double T = steps * dt;
  EXPECT_LE(std::abs(ins::kinetic_energy(s.u) - ke0 + dissipated), 1e-8 * T);
}

TEST(StableDtIns, ViscousAndAdvectiveLimits) {
  const auto g = make_grid(2, 32);
  const ins::InsState still{0.0, VectorField(g)};
  EXPECT_DOUBLE_EQ(ins::stable_dt(still, 0.2, 0.5), 0.5 * g->dx() * g->dx() / (2.0 * 2.0 * 0.1));
  const ins::InsState fast{0.0, VectorField(g, 100.0)};
  EXPECT_DOUBLE_EQ(ins::stable_dt(fast, 0.2, 0.5), 0.5 * g->dx() / (100.0 * std::sqrt(2.0)));
}
