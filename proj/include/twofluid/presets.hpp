#pragma once

// Divergence-free initial velocities and deterministic random profiles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "twofluid/field.hpp"

namespace twofluid::presets {

/// 2D: (sin x cos y, -cos x sin y). 3D: (sin x cos y cos z, -cos x sin y cos z, 0).
/// Coordinates are scaled by 2 pi / length so the field is periodic on any box.
inline VectorField taylor_green(const GridPtr& grid) {
  if (grid->dim() < 2) throw InvalidConfig("Taylor-Green needs dim >= 2");
  const int dim = grid->dim();
  const double k = 2.0 * std::numbers::pi / grid->length();
  std::vector<ScalarField> c;
  c.push_back(ScalarField::from_function(grid, [dim, k](std::span<const double> x) {
    return std::sin(k * x[0]) * std::cos(k * x[1]) * (dim == 3 ? std::cos(k * x[2]) : 1.0);
  }));
  c.push_back(ScalarField::from_function(grid, [dim, k](std::span<const double> x) {
    return -std::cos(k * x[0]) * std::sin(k * x[1]) * (dim == 3 ? std::cos(k * x[2]) : 1.0);
  }));
  if (dim == 3) c.emplace_back(grid);
  return VectorField(std::move(c));
}

/// Taylor-Green plus 0.1 * curl of psi = sin(2x) sin(y), which breaks the
/// steady nonlinear balance of the pure vortex.
inline VectorField taylor_green_perturbed(const GridPtr& grid) {
  VectorField u = taylor_green(grid);
  const double a = 0.1;
  const double k = 2.0 * std::numbers::pi / grid->length();
  u[0] += ScalarField::from_function(grid, [a, k](std::span<const double> x) {
    return a * std::sin(2.0 * k * x[0]) * std::cos(k * x[1]);
  });
  u[1] += ScalarField::from_function(grid, [a, k](std::span<const double> x) {
    return -2.0 * a * std::cos(2.0 * k * x[0]) * std::sin(k * x[1]);
  });
  return u;
}

inline VectorField named_velocity(const std::string& name, const GridPtr& grid) {
  if (name == "taylor_green") return taylor_green(grid);
  if (name == "taylor_green_perturbed") return taylor_green_perturbed(grid);
  if (name == "zero") return VectorField(grid);
  throw InvalidConfig("unknown velocity preset '" + name + "'");
}

/// Uniform doubles in [-1, 1) from a seeded 64-bit Mersenne twister. The
/// bit-to-double map is explicit so sequences match across standard libraries.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double operator()() {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * unit - 1.0;
  }

 private:
  std::mt19937_64 engine_;
};

/// Mode vectors of one half-space with 1 <= max|k_i| <= kmax.
inline std::vector<std::array<int, 3>> half_space_modes(int dim, int kmax) {
  std::vector<std::array<int, 3>> modes;
  const int lo = -kmax;
  for (int a = lo; a <= kmax; ++a) {
    for (int b = (dim > 1 ? lo : 0); b <= (dim > 1 ? kmax : 0); ++b) {
      for (int c = (dim > 2 ? lo : 0); c <= (dim > 2 ? kmax : 0); ++c) {
        const std::array<int, 3> k{a, b, c};
        int first = 0;
        for (int v : k) {
          if (v != 0) {
            first = v;
            break;
          }
        }
        if (first > 0) modes.push_back(k);
      }
    }
  }
  return modes;
}

/// Band-limited, mean-zero scalar profile with unit H^s norm.
inline ScalarField random_profile(const GridPtr& grid, UniformStream& rng, int s) {
  const int kmax = std::min(4, grid->n() / 3);
  const auto modes = half_space_modes(grid->dim(), kmax);
  std::vector<double> ca(modes.size()), cb(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    double k2 = 0.0;
    for (int v : modes[m]) k2 += static_cast<double>(v) * v;
    ca[m] = rng() / (1.0 + k2);
    cb[m] = rng() / (1.0 + k2);
  }
  ScalarField f(grid);
  const double kscale = 2.0 * std::numbers::pi / grid->length();
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double v = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      double phase = 0.0;
      for (int d = 0; d < grid->dim(); ++d) {
        phase += kscale * modes[m][d] * grid->coordinate(i, d);
      }
      v += ca[m] * std::cos(phase) + cb[m] * std::sin(phase);
    }
    f[i] = v;
  }
  f *= 1.0 / field::sobolev_norm(f, s);
  return f;
}

inline VectorField random_vector_profile(const GridPtr& grid, UniformStream& rng, int s) {
  std::vector<ScalarField> c;
  for (int d = 0; d < grid->dim(); ++d) c.push_back(random_profile(grid, rng, s));
  VectorField v(std::move(c));
  v *= 1.0 / field::sobolev_norm(v, s);
  return v;
}

}  // namespace twofluid::presets
