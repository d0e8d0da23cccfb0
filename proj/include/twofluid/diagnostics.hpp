#pragma once

// Energy functionals, relative energy and convergence-rate norms.

#include <algorithm>
#include <cmath>
#include <limits>

#include "twofluid/closure.hpp"
#include "twofluid/field.hpp"
#include "twofluid/twofluid_solver.hpp"

namespace twofluid::diagnostics {

/// 1/2 [ eps^-2 ||a||_{H^s}^2 + eps^-2 ||b||_{H^s}^2 + ||v||_{H^s}^2 ]
inline double energy_functional(const ScalarField& a, const ScalarField& b,
                                const VectorField& v, int s, double epsilon) {
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  return 0.5 * (inv_eps2 * field::sobolev_norm_squared(a, s) +
                inv_eps2 * field::sobolev_norm_squared(b, s) +
                field::sobolev_norm_squared(v, s));
}

inline double energy_E_s(const FieldState& st, int s, double epsilon) {
  return energy_functional(st.R - 1.0, st.Q - 1.0, st.u, s, epsilon);
}

struct SymmetrizedEnergy {
  double value = 0.0;
  /// Extremes over the grid of the normalized weights dp/dR / R, dp/dQ / Q,
  /// R + Q, and of the unit weight used at derivative orders j >= 1.
  double weight_min = 0.0;
  double weight_max = 0.0;
};

/// Symmetrized energy. The order-zero terms carry the pointwise weights
///   gamma_+ Z^(gamma_+ - 1) dZ/dR / (eps^2 R),
///   gamma_+ Z^(gamma_+ - 1) dZ/dQ / (eps^2 Q),   R + Q;
/// derivative orders 1..s keep the eps^-2 scaling but no pointwise weight.
/// Hence weight_min E_s <= F_s <= weight_max E_s.
inline SymmetrizedEnergy energy_F_s(const FieldState& st, int s, double epsilon,
                                    const closure::Gammas& g) {
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  const double dv = st.R.grid().cell_volume();
  double w_lo = 1.0;
  double w_hi = 1.0;
  double zeroth = 0.0;
  for (std::size_t i = 0; i < st.R.size(); ++i) {
    const double R = st.R[i];
    const double Q = st.Q[i];
    const auto j = closure::jet(R, Q, g);
    const double wR = j.dpdR / R;
    const double wQ = j.dpdQ / Q;
    const double wu = R + Q;
    w_lo = std::min({w_lo, wR, wQ, wu});
    w_hi = std::max({w_hi, wR, wQ, wu});
    double u2 = 0.0;
    for (const auto& c : st.u) u2 += c[i] * c[i];
    zeroth += inv_eps2 * (wR * (R - 1.0) * (R - 1.0) + wQ * (Q - 1.0) * (Q - 1.0)) + wu * u2;
  }
  zeroth *= dv;

  auto higher = [s](double k2) { return field::sobolev_multiplier(k2, s) - 1.0; };
  double rest = inv_eps2 * (field::spectral_quadratic_form(st.R - 1.0, higher) +
                            field::spectral_quadratic_form(st.Q - 1.0, higher));
  for (const auto& c : st.u) rest += field::spectral_quadratic_form(c, higher);
  return {0.5 * (zeroth + rest), w_lo, w_hi};
}

/// eps^-2 times the integral of the Bregman gap of the internal energy.
inline double relative_potential(const FieldState& st, double epsilon,
                                 const closure::RelativeEnergy& bregman) {
  double acc = 0.0;
  for (std::size_t i = 0; i < st.R.size(); ++i) acc += bregman(st.R[i], st.Q[i]);
  return acc * st.R.grid().cell_volume() / (epsilon * epsilon);
}

/// Integral of the internal energy density itself, without eps scaling.
inline double absolute_potential(const FieldState& st, const closure::Gammas& g) {
  double acc = 0.0;
  for (std::size_t i = 0; i < st.R.size(); ++i) {
    acc += closure::internal_energy_density(st.R[i], st.Q[i], g);
  }
  return acc * st.R.grid().cell_volume();
}

/// 1/2 int (R+Q)|u|^2 + eps^-2 int Bregman(R, Q)
inline double total_energy(const FieldState& st, double epsilon,
                           const closure::RelativeEnergy& bregman) {
  double kinetic = 0.0;
  for (std::size_t i = 0; i < st.R.size(); ++i) {
    double u2 = 0.0;
    for (const auto& c : st.u) u2 += c[i] * c[i];
    kinetic += (st.R[i] + st.Q[i]) * u2;
  }
  kinetic *= 0.5 * st.R.grid().cell_volume();
  return kinetic + relative_potential(st, epsilon, bregman);
}

/// 1/2 int |sqrt(R+Q) u_eps - sqrt(2) u|^2 + eps^-2 int Bregman + dissipation
inline double relative_energy(const FieldState& st, const VectorField& u_ref, double epsilon,
                              const closure::RelativeEnergy& bregman,
                              double dissipation_accumulated) {
  const double sqrt2 = std::sqrt(2.0);
  double kinetic = 0.0;
  for (std::size_t i = 0; i < st.R.size(); ++i) {
    const double w = std::sqrt(st.R[i] + st.Q[i]);
    for (int d = 0; d < st.u.dim(); ++d) {
      const double diff = w * st.u[d][i] - sqrt2 * u_ref[d][i];
      kinetic += diff * diff;
    }
  }
  kinetic *= 0.5 * st.R.grid().cell_volume();
  return kinetic + relative_potential(st, epsilon, bregman) + dissipation_accumulated;
}

/// Instantaneous viscous dissipation mu ||grad(u_eps - u)||^2 + (mu+lambda) ||div u_eps||^2.
inline double dissipation_rate(const VectorField& u_eps, const VectorField& u_ref,
                               double mu, double lambda) {
  const auto diff = u_eps - u_ref;
  double grad2 = 0.0;
  for (const auto& c : diff) {
    grad2 += field::spectral_quadratic_form(c, [](double k2) { return k2; });
  }
  const double div2 = field::sobolev_norm_squared(field::divergence(u_eps), 0);
  return mu * grad2 + (mu + lambda) * div2;
}

struct RateNorms {
  double R_Hs = 0.0;         ///< ||R - 1||_{H^s}
  double Q_Hs = 0.0;         ///< ||Q - 1||_{H^s}
  double RQ_Hs_sq = 0.0;     ///< ||R - 1||^2_{H^s} + ||Q - 1||^2_{H^s}
  double u_L2_sq = 0.0;      ///< ||u_eps - u||^2_{L2}
  double u_H1_sq = 0.0;      ///< ||u_eps - u||^2_{H1}, integrated in time by the caller
  double div_Hs1 = 0.0;      ///< ||div u_eps||_{H^{s-1}}
  double div_diff_Hs1 = 0.0; ///< ||div(u_eps - u)||_{H^{s-1}}
};

inline RateNorms rate_norms(const FieldState& st, const VectorField& u_ref, int s) {
  RateNorms r;
  const double r2 = field::sobolev_norm_squared(st.R - 1.0, s);
  const double q2 = field::sobolev_norm_squared(st.Q - 1.0, s);
  r.R_Hs = std::sqrt(r2);
  r.Q_Hs = std::sqrt(q2);
  r.RQ_Hs_sq = r2 + q2;
  const auto diff = st.u - u_ref;
  r.u_L2_sq = field::sobolev_norm_squared(diff, 0);
  r.u_H1_sq = field::sobolev_norm_squared(diff, 1);
  const int sd = std::max(s - 1, 0);
  r.div_Hs1 = field::sobolev_norm(field::divergence(st.u), sd);
  r.div_diff_Hs1 = field::sobolev_norm(field::divergence(diff), sd);
  return r;
}

/// Trapezoid-rule time integral over snapshot samples.
class TrapezoidAccumulator {
 public:
  TrapezoidAccumulator() = default;
  TrapezoidAccumulator(double total, double last_t, double last_value, bool started)
      : total_(total), last_t_(last_t), last_value_(last_value), started_(started) {}

  void add(double t, double value) {
    if (started_) total_ += 0.5 * (t - last_t_) * (value + last_value_);
    last_t_ = t;
    last_value_ = value;
    started_ = true;
  }
  double total() const noexcept { return total_; }
  double last_t() const noexcept { return last_t_; }
  double last_value() const noexcept { return last_value_; }
  bool started() const noexcept { return started_; }

 private:
  double total_ = 0.0;
  double last_t_ = 0.0;
  double last_value_ = 0.0;
  bool started_ = false;
};

struct EnergyReport {
  double t = 0.0;
  double E_s = 0.0;
  double F_s = 0.0;
  double F_weight_min = 0.0;
  double F_weight_max = 0.0;
  double rel_energy = 0.0;
  double visc_dissipation = 0.0;
  double rate_R = 0.0;
  double rate_Q = 0.0;
  double rate_RQ_sq = 0.0;
  double rate_u_L2 = 0.0;      ///< ||u_eps - u||^2_{L2}
  double rate_u_H1_int = 0.0;  ///< int_0^t ||u_eps - u||^2_{H1}
  double rate_div = 0.0;       ///< ||div u_eps||_{H^{s-1}}
  double rate_div_diff = 0.0;  ///< ||div(u_eps - u)||_{H^{s-1}}
  double total_energy = 0.0;
  double mass_R = 0.0;
  double mass_Q = 0.0;
  double potential_as_written = 0.0;

  /// ||u_eps - u||^2_{L2} + int ||u_eps - u||^2_{H1}
  double velocity_rate() const noexcept { return rate_u_L2 + rate_u_H1_int; }
};

/// Stateful evaluator for one run: accumulates the time integrals across
/// successive snapshots.
class RunDiagnostics {
 public:
  RunDiagnostics(const closure::Gammas& g, double mu, double lambda, double epsilon, int s)
      : gammas_(g), bregman_(g), mu_(mu), lambda_(lambda), epsilon_(epsilon), s_(s) {}

  EnergyReport observe(const FieldState& st, const VectorField& u_ref) {
    EnergyReport r;
    r.t = st.t;
    r.E_s = energy_E_s(st, s_, epsilon_);
    const auto F = energy_F_s(st, s_, epsilon_, gammas_);
    r.F_s = F.value;
    r.F_weight_min = F.weight_min;
    r.F_weight_max = F.weight_max;
    const auto norms = rate_norms(st, u_ref, s_);
    dissipation_.add(st.t, dissipation_rate(st.u, u_ref, mu_, lambda_));
    h1_.add(st.t, norms.u_H1_sq);
    r.visc_dissipation = dissipation_.total();
    r.rel_energy = relative_energy(st, u_ref, epsilon_, bregman_, dissipation_.total());
    r.rate_R = norms.R_Hs;
    r.rate_Q = norms.Q_Hs;
    r.rate_RQ_sq = norms.RQ_Hs_sq;
    r.rate_u_L2 = norms.u_L2_sq;
    r.rate_u_H1_int = h1_.total();
    r.rate_div = norms.div_Hs1;
    r.rate_div_diff = norms.div_diff_Hs1;
    r.total_energy = total_energy(st, epsilon_, bregman_);
    r.mass_R = field::integrate(st.R);
    r.mass_Q = field::integrate(st.Q);
    r.potential_as_written = absolute_potential(st, gammas_);
    return r;
  }

  const TrapezoidAccumulator& dissipation() const noexcept { return dissipation_; }
  const TrapezoidAccumulator& h1_integral() const noexcept { return h1_; }
  void restore(TrapezoidAccumulator dissipation, TrapezoidAccumulator h1) {
    dissipation_ = dissipation;
    h1_ = h1;
  }

 private:
  closure::Gammas gammas_;
  closure::RelativeEnergy bregman_;
  double mu_;
  double lambda_;
  double epsilon_;
  int s_;
  TrapezoidAccumulator dissipation_;
  TrapezoidAccumulator h1_;
};

}  // namespace twofluid::diagnostics
