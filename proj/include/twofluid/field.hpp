#pragma once

// Real fields on a SpectralGrid and the spectral operators acting on them.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "twofluid/grid.hpp"

namespace twofluid {

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double value = 0.0)
      : grid_(std::move(grid)), values_(grid_->size(), value) {}
  ScalarField(GridPtr grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size()) {
      throw InvalidConfig("sample count does not match grid");
    }
  }

  /// Samples f(x) on the grid; x has grid.dim() coordinates.
  static ScalarField from_function(
      const GridPtr& grid,
      const std::function<double(std::span<const double>)>& f) {
    ScalarField out(grid);
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < grid->size(); ++i) {
      for (int d = 0; d < grid->dim(); ++d) x[d] = grid->coordinate(i, d);
      out.values_[i] = f(std::span<const double>(x.data(), grid->dim()));
    }
    return out;
  }

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const SpectralGrid& grid() const noexcept { return *grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  ScalarField& operator+=(const ScalarField& o) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  ScalarField& operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
  }
  ScalarField& operator+=(double a) {
    for (double& v : values_) v += a;
    return *this;
  }
  /// this += a * o
  ScalarField& add_scaled(const ScalarField& o, double a) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * o.values_[i];
    return *this;
  }

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
  friend ScalarField operator+(ScalarField a, double s) { return a += s; }
  friend ScalarField operator-(ScalarField a, double s) { return a += -s; }

  /// Pointwise map.
  template <class F>
  ScalarField map(F&& f) const {
    ScalarField out(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = f(values_[i]);
    return out;
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const GridPtr& grid, double value = 0.0) {
    components_.reserve(grid->dim());
    for (int d = 0; d < grid->dim(); ++d) components_.emplace_back(grid, value);
  }
  explicit VectorField(std::vector<ScalarField> components)
      : components_(std::move(components)) {
    if (components_.empty() ||
        static_cast<int>(components_.size()) != components_[0].grid().dim()) {
      throw InvalidConfig("vector field needs exactly dim components");
    }
  }

  int dim() const noexcept { return static_cast<int>(components_.size()); }
  const GridPtr& grid_ptr() const noexcept { return components_.front().grid_ptr(); }
  const SpectralGrid& grid() const noexcept { return components_.front().grid(); }
  ScalarField& operator[](int d) noexcept { return components_[d]; }
  const ScalarField& operator[](int d) const noexcept { return components_[d]; }
  auto begin() noexcept { return components_.begin(); }
  auto end() noexcept { return components_.end(); }
  auto begin() const noexcept { return components_.begin(); }
  auto end() const noexcept { return components_.end(); }

  double max_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid().size(); ++i) {
      double s = 0.0;
      for (const auto& c : components_) s += c[i] * c[i];
      m = std::max(m, s);
    }
    return std::sqrt(m);
  }

  VectorField& operator+=(const VectorField& o) {
    for (int d = 0; d < dim(); ++d) components_[d] += o.components_[d];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    for (int d = 0; d < dim(); ++d) components_[d] -= o.components_[d];
    return *this;
  }
  VectorField& operator*=(double a) {
    for (auto& c : components_) c *= a;
    return *this;
  }
  VectorField& add_scaled(const VectorField& o, double a) {
    for (int d = 0; d < dim(); ++d) components_[d].add_scaled(o.components_[d], a);
    return *this;
  }

  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }

 private:
  std::vector<ScalarField> components_;
};

namespace field {

inline std::vector<Complex> spectrum(const ScalarField& f) {
  return f.grid().forward(f.values());
}

inline ScalarField from_spectrum(const GridPtr& grid, std::vector<Complex> s) {
  return ScalarField(grid, grid->inverse(std::move(s)));
}

inline void check_axis(const SpectralGrid& g, int axis) {
  if (axis < 0 || axis >= g.dim()) {
    throw AxisOutOfRange("axis " + std::to_string(axis) + " outside [0, " +
                         std::to_string(g.dim()) + ")");
  }
}

inline ScalarField ddx(const ScalarField& f, int axis) {
  const auto& g = f.grid();
  check_axis(g, axis);
  auto s = spectrum(f);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] *= Complex(0.0, g.derivative_wavenumber(i, axis));
  }
  return from_spectrum(f.grid_ptr(), std::move(s));
}

inline VectorField gradient(const ScalarField& f) {
  const auto& g = f.grid();
  const auto s = spectrum(f);
  std::vector<ScalarField> comps;
  for (int d = 0; d < g.dim(); ++d) {
    auto sd = s;
    for (std::size_t i = 0; i < sd.size(); ++i) {
      sd[i] *= Complex(0.0, g.derivative_wavenumber(i, d));
    }
    comps.push_back(from_spectrum(f.grid_ptr(), std::move(sd)));
  }
  return VectorField(std::move(comps));
}

inline ScalarField divergence(const VectorField& v) {
  const auto& g = v.grid();
  std::vector<Complex> acc(g.spectral_size(), Complex(0.0));
  for (int d = 0; d < v.dim(); ++d) {
    const auto s = spectrum(v[d]);
    for (std::size_t i = 0; i < s.size(); ++i) {
      acc[i] += s[i] * Complex(0.0, g.derivative_wavenumber(i, d));
    }
  }
  return from_spectrum(v.grid_ptr(), std::move(acc));
}

inline ScalarField laplacian(const ScalarField& f) {
  const auto& g = f.grid();
  auto s = spectrum(f);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= -g.k_squared(i);
  return from_spectrum(f.grid_ptr(), std::move(s));
}

inline VectorField laplacian(const VectorField& v) {
  std::vector<ScalarField> comps;
  for (const auto& c : v) comps.push_back(laplacian(c));
  return VectorField(std::move(comps));
}

/// Solves lap(phi) = f for mean-zero phi; the mean of f is discarded.
inline ScalarField inverse_laplacian(const ScalarField& f) {
  const auto& g = f.grid();
  auto s = spectrum(f);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double k2 = g.k_squared(i);
    s[i] = k2 > 0.0 ? -s[i] / k2 : Complex(0.0);
  }
  return from_spectrum(f.grid_ptr(), std::move(s));
}

/// Zeroes every mode with some |k_i| > n/3.
inline ScalarField dealias(const ScalarField& f) {
  const auto& g = f.grid();
  auto s = spectrum(f);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!g.dealias_keeps(i)) s[i] = Complex(0.0);
  }
  return from_spectrum(f.grid_ptr(), std::move(s));
}

inline VectorField dealias(const VectorField& v) {
  std::vector<ScalarField> comps;
  for (const auto& c : v) comps.push_back(dealias(c));
  return VectorField(std::move(comps));
}

/// Dealiased pointwise product.
inline ScalarField product(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid_ptr());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return dealias(out);
}

/// Grid quadrature of f over the torus.
inline double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

inline double inner(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().cell_volume();
}

inline double inner(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int d = 0; d < a.dim(); ++d) s += inner(a[d], b[d]);
  return s;
}

/// Sum over modes of w(k) |f_k|^2, scaled so that w = 1 gives the integral
/// of f^2 over the torus.
template <class Weight>
double spectral_quadratic_form(const ScalarField& f, Weight&& w) {
  const auto& g = f.grid();
  const auto s = spectrum(f);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc += g.parseval_weight(i) * w(g.k_squared(i)) * std::norm(s[i]);
  }
  const double n_total = static_cast<double>(g.size());
  return acc * g.volume() / (n_total * n_total);
}

/// m_s(k) = sum_{j=0}^{s} |k|^{2j}
inline double sobolev_multiplier(double k2, int s) {
  double m = 0.0;
  double term = 1.0;
  for (int j = 0; j <= s; ++j) {
    m += term;
    term *= k2;
  }
  return m;
}

inline void check_sobolev_index(int s) {
  if (s < 0 || s > 6) throw InvalidConfig("Sobolev index must lie in [0, 6]");
}

inline double sobolev_norm_squared(const ScalarField& f, int s) {
  check_sobolev_index(s);
  return spectral_quadratic_form(f, [s](double k2) { return sobolev_multiplier(k2, s); });
}

inline double sobolev_norm_squared(const VectorField& v, int s) {
  double acc = 0.0;
  for (const auto& c : v) acc += sobolev_norm_squared(c, s);
  return acc;
}

/// Equivalent discrete H^s norm: (sum_k m_s(k) |f_k|^2)^(1/2), normalized so
/// that s = 0 is the L2 norm over the torus.
inline double sobolev_norm(const ScalarField& f, int s) {
  return std::sqrt(sobolev_norm_squared(f, s));
}

inline double sobolev_norm(const VectorField& v, int s) {
  return std::sqrt(sobolev_norm_squared(v, s));
}

}  // namespace field
}  // namespace twofluid
