#pragma once

// Shared helpers for the test suites: a seeded uniform generator for property
// tests and a few tolerance helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "twofluid/grid.hpp"

namespace testing_support {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// |a - b| relative to max(|b|, 1)
inline double scaled_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

inline constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

}  // namespace testing_support
