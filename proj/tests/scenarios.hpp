#pragma once

// Numerical experiments shared by the unit suites and the acceptance binary.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "twofluid/ins_reference.hpp"
#include "twofluid/presets.hpp"
#include "twofluid/twofluid_solver.hpp"

namespace scenarios {

using namespace twofluid;

// ---------------------------------------------------------------------------
// Closure oracles.

/// Plain bisection on the closure residual, independent of solve_z.
inline double bisection_root(double R, double Q, const closure::Gammas& g) {
  const double gamma = g.gamma();
  auto F = [&](double z) { return std::pow(z, gamma) - R * std::pow(z, gamma - 1.0) - Q; };
  double a = R;
  double b = std::max(2.0 * R, std::pow(2.0 * Q, 1.0 / gamma));
  for (int i = 0; i < 400 && b - a > 1e-16 * b; ++i) {
    const double m = 0.5 * (a + b);
    (F(m) < 0.0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

inline double closure_residual(double z, double R, double Q, const closure::Gammas& g) {
  const double gamma = g.gamma();
  return std::abs(std::pow(z, gamma) - R * std::pow(z, gamma - 1.0) - Q) /
         std::max({1.0, Q, std::pow(z, gamma)});
}

// ---------------------------------------------------------------------------
// Linear acoustics in 1D.

struct AcousticResult {
  double measured_speed = 0.0;
  double expected_speed = 0.0;
  int crossings = 0;
};

/// (1 + a cos x, 1 + a cos x, 0) at eps = 1; the cos-x amplitude of R - 1
/// oscillates with angular frequency c |k|. The frequency is read off the
/// spacing of its zero crossings.
inline AcousticResult acoustic_dispersion(int n, double amplitude, const closure::Gammas& g,
                                          double mu, double lambda, double periods = 3.0) {
  const auto grid = make_grid(1, n);
  const auto j = closure::jet(1.0, 1.0, g);
  AcousticResult res;
  res.expected_speed = std::sqrt((j.dpdR + j.dpdQ) / 2.0);

  const auto bump = ScalarField::from_function(
      grid, [amplitude](std::span<const double> x) { return amplitude * std::cos(x[0]); });
  FieldState s{0.0, bump + 1.0, bump + 1.0, VectorField(grid)};
  const PhysParams p{g, mu, lambda, 1.0, nullptr};

  auto mode = [&](const FieldState& st) { return field::spectrum(st.R)[1].real(); };
  const double T = periods * 2.0 * std::numbers::pi / res.expected_speed;
  const double dt = 0.25 * stable_dt(s, p, 1.0);
  const int steps = static_cast<int>(std::ceil(T / dt));
  std::vector<double> times;
  double prev = mode(s);
  for (int i = 0; i < steps; ++i) {
    const auto next = step_rk4(s, p, dt);
    const double m = mode(next);
    if ((prev > 0.0) != (m > 0.0)) times.push_back(s.t + dt * prev / (prev - m));
    prev = m;
    s = next;
  }
  res.crossings = static_cast<int>(times.size());
  if (times.size() >= 2) {
    const double half_period = (times.back() - times.front()) / (times.size() - 1);
    res.measured_speed = std::numbers::pi / half_period;  // |k| = 1
  }
  return res;
}

// ---------------------------------------------------------------------------
// Manufactured solution in 1D:
//   R = 1 + a sin(x + t),  Q = 1 + a cos(x - t),  u = b sin x cos t.

struct Manufactured {
  closure::Gammas gammas{2.0, 3.0};
  double mu = 0.1;
  double lambda = 0.0;
  double epsilon = 1.0;
  double a = 0.1;
  double b = 0.2;

  struct Point {
    double R, Q, u, R_t, Q_t, u_t, R_x, Q_x, u_x, u_xx;
  };

  Point at(double x, double t) const {
    return {1.0 + a * std::sin(x + t), 1.0 + a * std::cos(x - t), b * std::sin(x) * std::cos(t),
            a * std::cos(x + t),       a * std::sin(x - t),       -b * std::sin(x) * std::sin(t),
            a * std::cos(x + t),       -a * std::sin(x - t),      b * std::cos(x) * std::cos(t),
            -b * std::sin(x) * std::cos(t)};
  }

  /// Continuous right-hand side N(U) of the unforced system at (x, t).
  std::array<double, 3> operator_value(double x, double t) const {
    const auto v = at(x, t);
    const auto j = closure::jet(v.R, v.Q, gammas);
    const double S = v.R + v.Q;
    return {-(v.R_x * v.u + v.R * v.u_x), -(v.Q_x * v.u + v.Q * v.u_x),
            -v.u * v.u_x - (j.dpdR * v.R_x + j.dpdQ * v.Q_x) / (epsilon * epsilon * S) +
                (2.0 * mu + lambda) * v.u_xx / S};
  }

  FieldState exact(const GridPtr& g, double t) const {
    auto f = [&](int c) {
      return ScalarField::from_function(g, [&, c](std::span<const double> x) {
        const auto v = at(x[0], t);
        return c == 0 ? v.R : (c == 1 ? v.Q : v.u);
      });
    };
    return FieldState{t, f(0), f(1), VectorField(std::vector<ScalarField>{f(2)})};
  }

  PhysParams params(const GridPtr& g) const {
    PhysParams p{gammas, mu, lambda, epsilon, nullptr};
    const Manufactured self = *this;
    p.forcing = [self, g](double t) {
      auto comp = [&](int c) {
        return ScalarField::from_function(g, [&, c](std::span<const double> x) {
          const auto v = self.at(x[0], t);
          const auto n = self.operator_value(x[0], t);
          const double dt = c == 0 ? v.R_t : (c == 1 ? v.Q_t : v.u_t);
          return dt - n[c];
        });
      };
      return Tendency{comp(0), comp(1), VectorField(std::vector<ScalarField>{comp(2)})};
    };
    return p;
  }

  /// Max-norm error at time T after `steps` RK4 steps on an n-point grid.
  double error(int n, int steps, double T) const {
    const auto g = make_grid(1, n);
    const auto p = params(g);
    FieldState s = exact(g, 0.0);
    const double dt = T / steps;
    for (int i = 0; i < steps; ++i) {
      s = step_rk4(s, p, dt);
      s.t = (i + 1) * dt;
    }
    const auto ref = exact(g, T);
    return std::max({(s.R - ref.R).max_abs(), (s.Q - ref.Q).max_abs(), (s.u[0] - ref.u[0]).max_abs()});
  }
};

// ---------------------------------------------------------------------------
// Taylor-Green decay for the incompressible reference.

struct TaylorGreenResult {
  double relative_l2_error = 0.0;
  double max_divergence = 0.0;
  bool energy_monotone = true;
};

inline TaylorGreenResult taylor_green_decay(int n, double mu, double dt, int steps) {
  const auto g = make_grid(2, n);
  const auto u0 = presets::taylor_green(g);
  ins::InsState s{0.0, u0};
  TaylorGreenResult res;
  double ke = ins::kinetic_energy(s.u);
  for (int i = 0; i < steps; ++i) {
    s = ins::step_rk4(s, mu, dt);
    s.t = (i + 1) * dt;
    res.max_divergence = std::max(res.max_divergence, field::divergence(s.u).max_abs());
    const double next = ins::kinetic_energy(s.u);
    if (next > ke) res.energy_monotone = false;
    ke = next;
  }
  // nu = mu/2 and |k|^2 = 2, so u(t) = u(0) exp(-2 nu t) = u(0) exp(-mu t).
  VectorField exact = u0;
  exact *= std::exp(-mu * s.t);
  res.relative_l2_error = std::sqrt(field::inner(s.u - exact, s.u - exact) / field::inner(exact, exact));
  return res;
}

}  // namespace scenarios
