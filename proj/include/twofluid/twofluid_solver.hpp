#pragma once

// Pseudo-spectral integrator for the Mach-scaled two-fluid system
//
//   R_t + div(R u) = 0
//   Q_t + div(Q u) = 0
//   u_t + u.grad u + grad p(Z(R,Q)) / (eps^2 (R+Q))
//       = (mu lap u + (mu+lambda) grad div u) / (R+Q)
//
// on a periodic box. Every quadratic product and every closure-derived
// coefficient field is dealiased with the 2/3 rule.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "twofluid/closure.hpp"
#include "twofluid/field.hpp"
#include "twofluid/presets.hpp"
#include "twofluid/rk4.hpp"

namespace twofluid {

inline constexpr double kDensityFloor = 1e-8;

struct FieldState {
  double t = 0.0;
  ScalarField R;
  ScalarField Q;
  VectorField u;
};

/// Time derivative of a FieldState.
struct Tendency {
  ScalarField R;
  ScalarField Q;
  VectorField u;
};

using Forcing = std::function<Tendency(double t)>;

struct PhysParams {
  closure::Gammas gammas;
  double mu = 0.1;
  double lambda = 0.0;
  double epsilon = 1.0;
  /// Optional source terms; used by manufactured-solution tests.
  Forcing forcing = nullptr;

  void validate() const {
    if (!(mu > 0.0)) throw InvalidConfig("mu must be positive");
    if (!(2.0 * mu + 3.0 * lambda >= 0.0)) {
      throw InvalidConfig("bulk viscosity violates 2 mu + 3 lambda >= 0");
    }
    if (!(epsilon > 0.0) || epsilon > 1.0) {
      throw InvalidConfig("epsilon must lie in (0, 1]");
    }
  }
};

inline FieldState advanced(const FieldState& y, const Tendency& k, double h) {
  FieldState out = y;
  out.R.add_scaled(k.R, h);
  out.Q.add_scaled(k.Q, h);
  out.u.add_scaled(k.u, h);
  out.t = y.t + h;
  return out;
}

inline void accumulate(FieldState& y, const Tendency& k, double h) {
  y.R.add_scaled(k.R, h);
  y.Q.add_scaled(k.Q, h);
  y.u.add_scaled(k.u, h);
}

inline void check_admissible(const ScalarField& R, const ScalarField& Q) {
  const double lo = std::min(R.min(), Q.min());
  if (!(lo > kDensityFloor)) {
    throw NonPositiveDensity("density left the admissible set: min(R, Q) = " +
                             std::to_string(lo));
  }
}

/// Dealiased coefficient fields of the momentum equation, evaluated from the
/// closure at (r, q):  a_R = dp/dR / (r+q),  a_Q = dp/dQ / (r+q),  1/(r+q).
struct MomentumCoefficients {
  ScalarField pressure_R;
  ScalarField pressure_Q;
  ScalarField inv_density;
};

inline MomentumCoefficients momentum_coefficients(const ScalarField& r,
                                                  const ScalarField& q,
                                                  const closure::Gammas& g) {
  check_admissible(r, q);
  MomentumCoefficients c{ScalarField(r.grid_ptr()), ScalarField(r.grid_ptr()),
                         ScalarField(r.grid_ptr())};
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto j = closure::jet(r[i], q[i], g);
    const double s = r[i] + q[i];
    c.pressure_R[i] = j.dpdR / s;
    c.pressure_Q[i] = j.dpdQ / s;
    c.inv_density[i] = 1.0 / s;
  }
  c.pressure_R = field::dealias(c.pressure_R);
  c.pressure_Q = field::dealias(c.pressure_Q);
  c.inv_density = field::dealias(c.inv_density);
  return c;
}

/// (v . grad) w, with every product dealiased.
inline VectorField advect(const VectorField& v, const VectorField& w) {
  VectorField out(v.grid_ptr());
  for (int i = 0; i < w.dim(); ++i) {
    const auto grad = field::gradient(w[i]);
    for (int j = 0; j < v.dim(); ++j) out[i] += field::product(v[j], grad[j]);
  }
  return out;
}

inline ScalarField advect(const VectorField& v, const ScalarField& f) {
  const auto grad = field::gradient(f);
  ScalarField out(f.grid_ptr());
  for (int j = 0; j < v.dim(); ++j) out += field::product(v[j], grad[j]);
  return out;
}

/// Momentum tendency shared by the nonlinear and frozen-coefficient solvers:
///   -(v.grad) u - (a_R grad R + a_Q grad Q)/eps^2 + (mu lap u + (mu+lambda) grad div u)/(r+q)
inline VectorField momentum_tendency(const VectorField& transport, const VectorField& u,
                                     const ScalarField& R, const ScalarField& Q,
                                     const MomentumCoefficients& c,
                                     const PhysParams& p) {
  const double inv_eps2 = 1.0 / (p.epsilon * p.epsilon);
  VectorField out = advect(transport, u);
  out *= -1.0;
  const auto gR = field::gradient(R);
  const auto gQ = field::gradient(Q);
  const auto lap = field::laplacian(u);
  const auto grad_div = field::gradient(field::divergence(u));
  for (int i = 0; i < u.dim(); ++i) {
    ScalarField pressure = field::product(c.pressure_R, gR[i]);
    pressure += field::product(c.pressure_Q, gQ[i]);
    out[i].add_scaled(pressure, -inv_eps2);
    ScalarField viscous = p.mu * lap[i];
    viscous.add_scaled(grad_div[i], p.mu + p.lambda);
    out[i] += field::product(c.inv_density, viscous);
  }
  return out;
}

/// Right-hand side of the two-fluid system in conservative form.
inline Tendency rhs(const FieldState& s, const PhysParams& p) {
  const auto coeff = momentum_coefficients(s.R, s.Q, p.gammas);
  auto flux = [&](const ScalarField& rho) {
    std::vector<ScalarField> c;
    for (int d = 0; d < s.u.dim(); ++d) c.push_back(field::product(rho, s.u[d]));
    return field::divergence(VectorField(std::move(c)));
  };
  Tendency k{flux(s.R), flux(s.Q), momentum_tendency(s.u, s.u, s.R, s.Q, coeff, p)};
  k.R *= -1.0;
  k.Q *= -1.0;
  if (p.forcing) {
    const Tendency f = p.forcing(s.t);
    k.R += f.R;
    k.Q += f.Q;
    k.u += f.u;
  }
  return k;
}

/// Largest local sound speed sqrt((dp/dR + dp/dQ)/(R+Q)) over the grid.
inline double max_sound_speed(const ScalarField& R, const ScalarField& Q,
                              const closure::Gammas& g) {
  double c2 = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const auto j = closure::jet(R[i], Q[i], g);
    c2 = std::max(c2, (j.dpdR + j.dpdQ) / (R[i] + Q[i]));
  }
  return std::sqrt(c2);
}

/// Acoustic CFL step capped by the explicit viscous limit.
inline double stable_dt(const FieldState& s, const PhysParams& p, double cfl) {
  if (!(cfl > 0.0) || cfl > 1.0) throw InvalidConfig("cfl must lie in (0, 1]");
  check_admissible(s.R, s.Q);
  const auto& g = s.R.grid();
  const double dx = g.dx();
  const double c = max_sound_speed(s.R, s.Q, p.gammas);
  const double dt_acoustic = cfl * dx / (s.u.max_norm() + c / p.epsilon);
  double inv_s = 0.0;
  for (std::size_t i = 0; i < s.R.size(); ++i) {
    inv_s = std::max(inv_s, 1.0 / (s.R[i] + s.Q[i]));
  }
  const double nu = std::max(p.mu, p.mu + p.lambda) * inv_s;
  const double dt_viscous = cfl * dx * dx / (2.0 * g.dim() * nu);
  return std::min(dt_acoustic, dt_viscous);
}

inline FieldState step_rk4(const FieldState& s, const PhysParams& p, double dt) {
  return rk4_step(s, dt, [&p](const FieldState& y) { return rhs(y, p); });
}

/// Well-prepared data around (1, 1, u0):
///   R = 1 + eps^2 delta0 r,  Q = 1 + eps^2 delta0 q,  u = u0 + eps delta0 w,
/// with r, q of unit H^s norm and w of unit H^(s+1) norm, drawn from `seed`.
inline FieldState well_prepared_init(const VectorField& u0, double delta0, double epsilon,
                                     std::uint64_t seed, int s) {
  const auto& grid = u0.grid_ptr();
  const double div = field::divergence(u0).max_abs();
  if (div > 1e-12) {
    throw NonDivergenceFree("initial velocity has |div u0| = " + std::to_string(div));
  }
  FieldState st{0.0, ScalarField(grid, 1.0), ScalarField(grid, 1.0), u0};
  if (delta0 == 0.0) return st;

  presets::UniformStream rng(seed);
  const auto r = presets::random_profile(grid, rng, s);
  const auto q = presets::random_profile(grid, rng, s);
  const auto w = presets::random_vector_profile(grid, rng, s + 1);
  st.R.add_scaled(r, epsilon * epsilon * delta0);
  st.Q.add_scaled(q, epsilon * epsilon * delta0);
  st.u.add_scaled(w, epsilon * delta0);
  return st;
}

}  // namespace twofluid
