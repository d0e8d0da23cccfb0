#pragma once

namespace twofluid {

/// Classical four-stage Runge-Kutta step.
///
/// State must expose a time member `t`; the free functions
/// `advanced(state, tendency, h)` (copy displaced by h * tendency, time
/// shifted by h) and `accumulate(state, tendency, h)` are found by ADL.
template <class State, class Rhs>
State rk4_step(const State& y, double dt, Rhs&& rhs) {
  const auto k1 = rhs(y);
  const auto k2 = rhs(advanced(y, k1, 0.5 * dt));
  const auto k3 = rhs(advanced(y, k2, 0.5 * dt));
  const auto k4 = rhs(advanced(y, k3, dt));
  State out = advanced(y, k1, dt / 6.0);
  accumulate(out, k2, dt / 3.0);
  accumulate(out, k3, dt / 3.0);
  accumulate(out, k4, dt / 6.0);
  out.t = y.t + dt;
  return out;
}

}  // namespace twofluid
