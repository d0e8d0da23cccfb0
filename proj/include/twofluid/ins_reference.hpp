#pragma once

// Incompressible Navier-Stokes reference solver,
//   u_t + u.grad u + grad Pi = (mu/2) lap u,   div u = 0,
// advanced with the same RK4 machinery as the two-fluid solver. The pressure
// is never time-stepped; it is recovered spectrally on request.

#include "twofluid/field.hpp"
#include "twofluid/rk4.hpp"
#include "twofluid/twofluid_solver.hpp"

namespace twofluid::ins {

struct InsState {
  double t = 0.0;
  VectorField u;
};

inline InsState advanced(const InsState& y, const VectorField& k, double h) {
  InsState out = y;
  out.u.add_scaled(k, h);
  out.t = y.t + h;
  return out;
}

inline void accumulate(InsState& y, const VectorField& k, double h) { y.u.add_scaled(k, h); }

/// v - grad lap^{-1} div v; the mean flow passes through.
inline VectorField leray_project(const VectorField& v) {
  const auto& g = v.grid();
  std::vector<std::vector<Complex>> s;
  for (const auto& c : v) s.push_back(field::spectrum(c));
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const double k2 = g.k_squared(i);
    if (k2 == 0.0) continue;
    // Use the derivative wavenumbers so the result is divergence-free under
    // field::divergence, including at the Nyquist planes.
    Complex kdotv(0.0);
    double kk = 0.0;
    for (int d = 0; d < v.dim(); ++d) {
      const double k = g.derivative_wavenumber(i, d);
      kdotv += k * s[d][i];
      kk += k * k;
    }
    if (kk == 0.0) continue;
    for (int d = 0; d < v.dim(); ++d) {
      s[d][i] -= g.derivative_wavenumber(i, d) * kdotv / kk;
    }
  }
  std::vector<ScalarField> out;
  for (int d = 0; d < v.dim(); ++d) out.push_back(field::from_spectrum(v.grid_ptr(), std::move(s[d])));
  return VectorField(std::move(out));
}

/// P(-(u.grad)u) + (mu/2) lap u
inline VectorField rhs_ins(const InsState& state, double mu) {
  VectorField nonlinear = advect(state.u, state.u);
  nonlinear *= -1.0;
  VectorField out = leray_project(nonlinear);
  out.add_scaled(field::laplacian(state.u), 0.5 * mu);
  return out;
}

/// Mean-zero pressure Pi = -lap^{-1} div((u.grad)u).
inline ScalarField pressure(const VectorField& u) {
  auto pi = field::inverse_laplacian(field::divergence(advect(u, u)));
  pi *= -1.0;
  return pi;
}

inline InsState step_rk4(const InsState& s, double mu, double dt) {
  return rk4_step(s, dt, [mu](const InsState& y) { return rhs_ins(y, mu); });
}

/// Advective CFL with the explicit viscous cap for viscosity mu/2.
inline double stable_dt(const InsState& s, double mu, double cfl) {
  if (!(cfl > 0.0) || cfl > 1.0) throw InvalidConfig("cfl must lie in (0, 1]");
  const auto& g = s.u.grid();
  const double dx = g.dx();
  const double umax = s.u.max_norm();
  const double dt_visc = cfl * dx * dx / (2.0 * g.dim() * 0.5 * mu);
  return umax > 0.0 ? std::min(cfl * dx / umax, dt_visc) : dt_visc;
}

inline double kinetic_energy(const VectorField& u) { return 0.5 * field::inner(u, u); }

/// 1/2 ||grad u||^2
inline double enstrophy(const VectorField& u) {
  double acc = 0.0;
  for (const auto& c : u) {
    acc += field::spectral_quadratic_form(c, [](double k2) { return k2; });
  }
  return 0.5 * acc;
}

}  // namespace twofluid::ins
