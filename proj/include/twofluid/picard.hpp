#pragma once

// Picard construction for the two-fluid system.
//
// Each iterate solves the frozen-coefficient linear problem
//
//   R_t + v.grad R + r div u = 0
//   Q_t + v.grad Q + q div u = 0
//   u_t + v.grad u + (a_R(r,q) grad R + a_Q(r,q) grad Q) / eps^2
//       = (mu lap u + (mu+lambda) grad div u) / (r+q)
//
// with (r, q, v) the previous iterate and a_R = dp/dR / (r+q), a_Q = dp/dQ / (r+q).

#include <algorithm>
#include <cmath>
#include <vector>

#include "twofluid/diagnostics.hpp"
#include "twofluid/twofluid_solver.hpp"

namespace twofluid::picard {

/// Solution samples on the uniform time grid t_i = i * dt, i = 0..steps.
struct Trajectory {
  double dt = 0.0;
  std::vector<FieldState> states;

  int steps() const noexcept { return static_cast<int>(states.size()) - 1; }
};

/// Constant-in-time lift of a single state.
inline Trajectory constant_lift(const FieldState& s, double dt, int steps) {
  Trajectory tr{dt, {}};
  tr.states.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    FieldState c = s;
    c.t = i * dt;
    tr.states.push_back(std::move(c));
  }
  return tr;
}

/// Frozen (r, q, v) and the closure coefficients derived from them.
struct FrozenSample {
  ScalarField r;
  ScalarField q;
  VectorField v;
  MomentumCoefficients coeff;
};

class FrozenCoefficients {
 public:
  FrozenCoefficients(const Trajectory& tr, const closure::Gammas& g)
      : trajectory_(tr), gammas_(g) {
    for (const auto& s : tr.states) check_admissible(s.R, s.Q);
  }

  int steps() const noexcept { return trajectory_.steps(); }
  double dt() const noexcept { return trajectory_.dt; }

  FrozenSample at_node(int i) const { return make(trajectory_.states[i]); }

  /// Cubic Lagrange interpolation at t_i + dt/2 from the nearest four nodes
  /// (fewer when the trajectory is shorter).
  FrozenSample at_midpoint(int i) const {
    const int last = steps();
    const int width = std::min(4, last + 1);
    const int start = std::clamp(i - 1, 0, last + 1 - width);
    const double x = i + 0.5;
    FieldState mix = trajectory_.states[start];
    mix.R *= 0.0;
    mix.Q *= 0.0;
    mix.u *= 0.0;
    for (int a = 0; a < width; ++a) {
      double w = 1.0;
      for (int b = 0; b < width; ++b) {
        if (b != a) w *= (x - (start + b)) / static_cast<double>(a - b);
      }
      const auto& node = trajectory_.states[start + a];
      mix.R.add_scaled(node.R, w);
      mix.Q.add_scaled(node.Q, w);
      mix.u.add_scaled(node.u, w);
    }
    return make(mix);
  }

 private:
  FrozenSample make(const FieldState& s) const {
    return {s.R, s.Q, s.u, momentum_coefficients(s.R, s.Q, gammas_)};
  }

  const Trajectory& trajectory_;
  closure::Gammas gammas_;
};

/// Tendency of the frozen-coefficient linear system.
inline Tendency linear_rhs(const FieldState& y, const FrozenSample& f, const PhysParams& p) {
  const auto div_u = field::divergence(y.u);
  Tendency k{advect(f.v, y.R), advect(f.v, y.Q),
             momentum_tendency(f.v, y.u, y.R, y.Q, f.coeff, p)};
  k.R += field::product(f.r, div_u);
  k.Q += field::product(f.q, div_u);
  k.R *= -1.0;
  k.Q *= -1.0;
  return k;
}

/// RK4 integration of the linear system on the frozen trajectory's time grid.
inline Trajectory linear_solve(const Trajectory& frozen_tr, const FieldState& init,
                               const PhysParams& p) {
  const FrozenCoefficients frozen(frozen_tr, p.gammas);
  const double dt = frozen.dt();
  Trajectory out{dt, {}};
  out.states.reserve(frozen.steps() + 1);
  FieldState y = init;
  y.t = 0.0;
  out.states.push_back(y);
  FrozenSample left = frozen.at_node(0);
  for (int i = 0; i < frozen.steps(); ++i) {
    const FrozenSample mid = frozen.at_midpoint(i);
    FrozenSample right = frozen.at_node(i + 1);
    const auto k1 = linear_rhs(y, left, p);
    const auto k2 = linear_rhs(advanced(y, k1, 0.5 * dt), mid, p);
    const auto k3 = linear_rhs(advanced(y, k2, 0.5 * dt), mid, p);
    const auto k4 = linear_rhs(advanced(y, k3, dt), right, p);
    FieldState next = advanced(y, k1, dt / 6.0);
    accumulate(next, k2, dt / 3.0);
    accumulate(next, k3, dt / 3.0);
    accumulate(next, k4, dt / 6.0);
    next.t = (i + 1) * dt;
    y = std::move(next);
    out.states.push_back(y);
    left = std::move(right);
  }
  return out;
}

/// Nonlinear solver on the same time grid, for comparison with the iteration.
inline Trajectory nonlinear_solve(const FieldState& init, const PhysParams& p, double dt,
                                  int steps) {
  Trajectory out{dt, {}};
  FieldState y = init;
  y.t = 0.0;
  out.states.push_back(y);
  for (int i = 0; i < steps; ++i) {
    y = step_rk4(y, p, dt);
    y.t = (i + 1) * dt;
    out.states.push_back(y);
  }
  return out;
}

struct Distance {
  /// sup_t ( eps^-2 ||dR||^2 + eps^-2 ||dQ||^2 + ||du||^2 ), all in L2
  double sup_part = 0.0;
  /// int_0^T ||du||^2_{H1} by the trapezoid rule
  double h1_integral = 0.0;
  double total() const noexcept { return sup_part + h1_integral; }
};

inline Distance contraction_distance(const Trajectory& a, const Trajectory& b, double epsilon) {
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  Distance d;
  diagnostics::TrapezoidAccumulator h1;
  const std::size_t count = std::min(a.states.size(), b.states.size());
  for (std::size_t i = 0; i < count; ++i) {
    const auto& x = a.states[i];
    const auto& y = b.states[i];
    const double sup_term = inv_eps2 * field::sobolev_norm_squared(x.R - y.R, 0) +
                            inv_eps2 * field::sobolev_norm_squared(x.Q - y.Q, 0) +
                            field::sobolev_norm_squared(x.u - y.u, 0);
    d.sup_part = std::max(d.sup_part, sup_term);
    h1.add(x.t, field::sobolev_norm_squared(x.u - y.u, 1));
  }
  d.h1_integral = h1.total();
  return d;
}

struct ContractionRecord {
  int k = 0;                 ///< distance between iterates k+1 and k
  Distance distance;
  double ratio = 0.0;        ///< d_k / d_{k-1}; zero for the first record
  double E_s_sup = 0.0;      ///< sup_t E_s of iterate k+1
  double Es1_dt_sup = 0.0;   ///< sup_t E_{s-1}(R_t, Q_t, u_t) of iterate k+1

  double d() const noexcept { return distance.total(); }
};

struct PicardResult {
  Trajectory final_iterate;
  std::vector<ContractionRecord> records;
};

/// sup over nodes of E_s and of E_{s-1} applied to the time derivatives.
inline std::pair<double, double> energy_suprema(const Trajectory& iterate, const Trajectory& frozen_tr,
                                                const PhysParams& p, int s) {
  const FrozenCoefficients frozen(frozen_tr, p.gammas);
  double e_sup = 0.0;
  double et_sup = 0.0;
  for (int i = 0; i <= iterate.steps(); ++i) {
    const auto& st = iterate.states[i];
    e_sup = std::max(e_sup, diagnostics::energy_E_s(st, s, p.epsilon));
    const auto k = linear_rhs(st, frozen.at_node(i), p);
    et_sup = std::max(et_sup, diagnostics::energy_functional(k.R, k.Q, k.u, std::max(s - 1, 0),
                                                             p.epsilon));
  }
  return {e_sup, et_sup};
}

/// K Picard iterations from the constant lift of `init`.
inline PicardResult iterate(const FieldState& init, const PhysParams& p, double dt, int steps,
                            int K, int s) {
  if (K < 1) throw InvalidConfig("Picard iteration count must be at least 1");
  if (steps < 1) throw InvalidConfig("Picard needs at least one time step");
  PicardResult res;
  Trajectory prev = constant_lift(init, dt, steps);
  for (int k = 0; k < K; ++k) {
    Trajectory next = linear_solve(prev, init, p);
    ContractionRecord rec;
    rec.k = k;
    rec.distance = contraction_distance(next, prev, p.epsilon);
    if (!res.records.empty() && res.records.back().d() > 0.0) {
      rec.ratio = rec.d() / res.records.back().d();
    }
    std::tie(rec.E_s_sup, rec.Es1_dt_sup) = energy_suprema(next, prev, p, s);
    res.records.push_back(rec);
    prev = std::move(next);
  }
  res.final_iterate = std::move(prev);
  return res;
}

}  // namespace twofluid::picard
