#pragma once

// Algebraic pressure closure for the two-fluid model.
//
// Given partial densities R (phase "+") and Q (phase "-"), the closure root Z
// solves
//
//     Q = (1 - R/Z) Z^gamma,   gamma = gamma_plus / gamma_minus,   R <= Z,
//
// and the common pressure is p = Z^gamma_plus. The volume fraction of phase
// "+" is alpha = R/Z.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twofluid/errors.hpp"

namespace twofluid::closure {

inline constexpr double kDefaultTol = 1e-13;
inline constexpr int kMaxIterations = 200;

class Gammas {
 public:
  Gammas(double gamma_plus, double gamma_minus)
      : gamma_plus_(gamma_plus), gamma_minus_(gamma_minus) {
    if (!(gamma_plus > 1.0) || !(gamma_minus > 1.0)) {
      throw InvalidConfig("adiabatic exponents must exceed 1 (got " +
                          std::to_string(gamma_plus) + ", " +
                          std::to_string(gamma_minus) + ")");
    }
  }

  double gamma_plus() const noexcept { return gamma_plus_; }
  double gamma_minus() const noexcept { return gamma_minus_; }
  /// gamma = gamma_plus / gamma_minus
  double gamma() const noexcept { return gamma_plus_ / gamma_minus_; }

  /// Exponents with the phase labels exchanged.
  Gammas swapped() const { return Gammas(gamma_minus_, gamma_plus_); }

  friend bool operator==(const Gammas&, const Gammas&) = default;

 private:
  double gamma_plus_;
  double gamma_minus_;
};

struct Bracket {
  double low;
  double high;
};

/// Closure root together with every first and second derivative of Z(R,Q)
/// and of p(Z(R,Q)).
struct ClosureJet {
  double R = 0.0;
  double Q = 0.0;
  double Z = 0.0;
  double alpha = 0.0;
  double p = 0.0;
  double dZdR = 0.0;
  double dZdQ = 0.0;
  double d2ZdRR = 0.0;
  double d2ZdRQ = 0.0;
  double d2ZdQQ = 0.0;
  double dpdR = 0.0;
  double dpdQ = 0.0;
  double d2pdRR = 0.0;
  double d2pdRQ = 0.0;
  double d2pdQQ = 0.0;
};

namespace detail {

inline void check_densities(double R, double Q) {
  if (!(R >= 0.0) || !(Q >= 0.0)) {
    throw DegenerateState("closure requires R >= 0 and Q >= 0");
  }
  if (R == 0.0 && Q == 0.0) {
    throw DegenerateState("closure undefined at vacuum R = Q = 0");
  }
}

/// F(Z) = Z^gamma - R Z^(gamma-1) - Q, written to avoid cancellation near Z=R.
inline double residual(double z, double R, double Q, double gamma) {
  return std::pow(z, gamma - 1.0) * (z - R) - Q;
}

/// dF/dZ = gamma Z^(gamma-1) - R (gamma-1) Z^(gamma-2)
inline double residual_slope(double z, double R, double gamma) {
  return std::pow(z, gamma - 2.0) * (gamma * z - (gamma - 1.0) * R);
}

inline double residual_scale(double z, double Q, double gamma) {
  return std::max({1.0, Q, std::pow(z, gamma)});
}

inline constexpr double kFloor = 1e-300;
inline constexpr double kBracketPad = 1e-12;

}  // namespace detail

/// Root bracket [low, high]: F(low) <= 0 <= F(high). With Z >= 2R we have
/// 1 - R/Z >= 1/2, and Z^gamma >= 2Q then forces F >= 0.
inline Bracket z_bracket(double R, double Q, const Gammas& g) {
  detail::check_densities(R, Q);
  const double gamma = g.gamma();
  const double low = std::max(R, detail::kFloor);
  const double r_eff = std::max(R, detail::kFloor);
  const double q_eff = std::max(Q, detail::kFloor);
  const double high = std::max({2.0 * r_eff, std::pow(2.0 * q_eff, 1.0 / gamma),
                                low * (1.0 + detail::kBracketPad)});
  return {low, high};
}

/// Unique closure root Z(R,Q) by safeguarded Newton on the bracket.
inline double solve_z(double R, double Q, const Gammas& g,
                      double tol = kDefaultTol) {
  detail::check_densities(R, Q);
  if (!(tol > 0.0)) throw InvalidConfig("solve_z: tol must be positive");
  const double gamma = g.gamma();
  if (Q == 0.0) return R;
  if (R == 0.0) return std::pow(Q, 1.0 / gamma);

  auto [a, b] = z_bracket(R, Q, g);
  double fa = detail::residual(a, R, Q, gamma);
  double fb = detail::residual(b, R, Q, gamma);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa > 0.0 || fb < 0.0) {
    throw NonConvergence("solve_z: bracket does not enclose a sign change");
  }

  // R + Q is exact for gamma = 1 and a reasonable start elsewhere.
  double z = R + Q;
  if (!(z > a && z < b)) z = 0.5 * (a + b);
  double fz = detail::residual(z, R, Q, gamma);
  double f_prev = std::numeric_limits<double>::infinity();
  bool last_was_newton = false;

  for (int it = 0; it < kMaxIterations; ++it) {
    if (fz == 0.0) return z;
    if (fz < 0.0) {
      a = z;
    } else {
      b = z;
    }

    const double slope = detail::residual_slope(z, R, gamma);
    const bool stalled = last_was_newton && std::abs(fz) > 0.5 * std::abs(f_prev);
    double next = z - fz / slope;
    last_was_newton = true;
    if (!(slope > 0.0) || !(next > a && next < b) || stalled) {
      next = 0.5 * (a + b);
      last_was_newton = false;
    }

    const double step = next - z;
    f_prev = fz;
    z = next;
    fz = detail::residual(z, R, Q, gamma);

    const bool small_residual =
        std::abs(fz) <= tol * detail::residual_scale(z, Q, gamma);
    if (small_residual && std::abs(step) <= tol * z) return z;
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * z) {
      if (small_residual) return z;
      break;
    }
  }
  throw NonConvergence("solve_z: no convergence within " +
                       std::to_string(kMaxIterations) + " iterations at R=" +
                       std::to_string(R) + ", Q=" + std::to_string(Q));
}

/// Evaluates every closure derivative formula at (R, Q).
inline ClosureJet jet(double R, double Q, const Gammas& g,
                      double tol = kDefaultTol) {
  const double Z = solve_z(R, Q, g, tol);
  const double gamma = g.gamma();
  const double gp = g.gamma_plus();

  ClosureJet j;
  j.R = R;
  j.Q = Q;
  j.Z = Z;
  j.alpha = std::clamp(R / Z, 0.0, 1.0);
  j.p = std::pow(Z, gp);

  const double zg1 = std::pow(Z, gamma - 1.0);
  const double zg2 = std::pow(Z, gamma - 2.0);
  const double zg3 = std::pow(Z, gamma - 3.0);
  const double denom = gamma * zg1 - R * (gamma - 1.0) * zg2;
  const double denom2 = denom * denom;

  j.dZdR = zg1 / denom;
  j.dZdQ = 1.0 / denom;

  j.d2ZdRR = ((gamma - 1.0) * zg2 * j.dZdR) * denom / denom2 -
             zg1 *
                 (gamma * (gamma - 1.0) * zg2 * j.dZdR - (gamma - 1.0) * zg2 -
                  (gamma - 1.0) * R * (gamma - 2.0) * zg3 * j.dZdR) /
                 denom2;
  j.d2ZdRQ = ((gamma - 1.0) * zg2 * j.dZdQ) * denom / denom2 -
             zg1 *
                 (gamma * (gamma - 1.0) * zg2 * j.dZdQ -
                  R * (gamma - 1.0) * (gamma - 2.0) * zg3 * j.dZdQ) /
                 denom2;
  j.d2ZdQQ = -(gamma * (gamma - 1.0) * zg2 * j.dZdQ -
               R * (gamma - 1.0) * (gamma - 2.0) * zg3 * j.dZdQ) /
             denom2;

  const double pz1 = gp * std::pow(Z, gp - 1.0);
  const double pz2 = gp * (gp - 1.0) * std::pow(Z, gp - 2.0);
  j.dpdR = pz1 * j.dZdR;
  j.dpdQ = pz1 * j.dZdQ;
  j.d2pdRR = pz2 * j.dZdR * j.dZdR + pz1 * j.d2ZdRR;
  j.d2pdRQ = pz2 * j.dZdQ * j.dZdR + pz1 * j.d2ZdRQ;
  j.d2pdQQ = pz2 * j.dZdQ * j.dZdQ + pz1 * j.d2ZdQQ;
  return j;
}

/// Internal energy per unit volume
///   e = (R/alpha)^g+ alpha / (g+ - 1) + (Q/(1-alpha))^g- (1-alpha) / (g- - 1).
/// A vanishing phase (alpha = 0 or 1) drops out.
inline double internal_energy_density(double R, double Q, const Gammas& g) {
  detail::check_densities(R, Q);
  const double gp = g.gamma_plus();
  const double gm = g.gamma_minus();
  if (Q == 0.0) return std::pow(R, gp) / (gp - 1.0);
  if (R == 0.0) return std::pow(Q, gm) / (gm - 1.0);
  const double Z = solve_z(R, Q, g);
  const double alpha = R / Z;
  double e = std::pow(R / alpha, gp) * alpha / (gp - 1.0);
  if (alpha < 1.0) {
    e += std::pow(Q / (1.0 - alpha), gm) * (1.0 - alpha) / (gm - 1.0);
  }
  return e;
}

struct EnergyGradient {
  double dR;
  double dQ;
};

/// Gradient of internal_energy_density via the closure jet.
///
/// Written as e = R Z^(g+-1)/(g+-1) + (Z^g+ - R Z^(g+-1))/(g--1), a function
/// of (Z, R); the chain rule supplies dZ/dR and dZ/dQ.
inline EnergyGradient internal_energy_gradient(const ClosureJet& j,
                                               const Gammas& g) {
  const double gp = g.gamma_plus();
  const double gm = g.gamma_minus();
  const double Z = j.Z;
  const double zp1 = std::pow(Z, gp - 1.0);
  const double zp2 = std::pow(Z, gp - 2.0);
  const double dE_dZ =
      j.R * zp2 + (gp * zp1 - j.R * (gp - 1.0) * zp2) / (gm - 1.0);
  const double dE_dR = zp1 / (gp - 1.0) - zp1 / (gm - 1.0);
  return {dE_dR + dE_dZ * j.dZdR, dE_dZ * j.dZdQ};
}

/// Bregman gap of the internal energy about the limit state (1, 1).
class RelativeEnergy {
 public:
  explicit RelativeEnergy(const Gammas& g)
      : gammas_(g),
        e0_(internal_energy_density(1.0, 1.0, g)),
        grad0_(internal_energy_gradient(jet(1.0, 1.0, g), g)) {}

  double operator()(double R, double Q) const {
    return internal_energy_density(R, Q, gammas_) - e0_ -
           grad0_.dR * (R - 1.0) - grad0_.dQ * (Q - 1.0);
  }

  double base_energy() const noexcept { return e0_; }
  EnergyGradient base_gradient() const noexcept { return grad0_; }

 private:
  Gammas gammas_;
  double e0_;
  EnergyGradient grad0_;
};

inline double relative_internal_energy_density(double R, double Q,
                                               const Gammas& g) {
  return RelativeEnergy(g)(R, Q);
}

}  // namespace twofluid::closure
