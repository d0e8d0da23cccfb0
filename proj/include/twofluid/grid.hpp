#pragma once

// Periodic grids and FFTW-backed real transforms.
//
// Samples are stored row-major with the last axis fastest. The spectrum of a
// real field is the half-complex r2c layout: full index range on every axis
// except the last, which holds modes 0..n/2. Forward transforms are unscaled;
// inverse transforms divide by n^dim.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "twofluid/errors.hpp"

namespace twofluid {

using Complex = std::complex<double>;

namespace detail {

// FFTW's planner is not thread-safe; plan execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlans {
 public:
  FftPlans(int dim, int n) {
    std::array<int, 3> dims{n, n, n};
    std::size_t real_size = 1;
    for (int d = 0; d < dim; ++d) real_size *= static_cast<std::size_t>(n);
    const std::size_t spec_size = real_size / n * (n / 2 + 1);
    std::vector<double> re(real_size);
    std::vector<Complex> sp(spec_size);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c(dim, dims.data(), re.data(),
                                 reinterpret_cast<fftw_complex*>(sp.data()),
                                 flags);
    inverse_ = fftw_plan_dft_c2r(dim, dims.data(),
                                 reinterpret_cast<fftw_complex*>(sp.data()),
                                 re.data(), flags);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
  ~FftPlans() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  void forward(const double* in, Complex* out) const {
    // r2c leaves its input intact; FFTW's signature is simply non-const.
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
  }
  /// Destroys `in`.
  void inverse(Complex* in, double* out) const {
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(in), out);
  }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace detail

/// Uniform periodic grid on [0, length)^dim with its spectral tables.
class SpectralGrid {
 public:
  SpectralGrid(int dim, int n, double length = 2.0 * std::numbers::pi)
      : dim_(dim), n_(n), length_(length) {
    if (dim < 1 || dim > 3) {
      throw InvalidConfig("grid dimension must be 1, 2 or 3");
    }
    if (n < 8 || n % 2 != 0) {
      throw InvalidConfig("grid resolution must be even and at least 8");
    }
    if (!(length > 0.0)) throw InvalidConfig("grid length must be positive");

    size_ = 1;
    for (int d = 0; d < dim; ++d) size_ *= static_cast<std::size_t>(n);
    half_ = n / 2 + 1;
    spectral_size_ = size_ / n * half_;

    modes_.resize(n);
    for (int i = 0; i < n; ++i) modes_[i] = i <= n / 2 ? i : i - n;
    if (modes_[n / 2] > 0) modes_[n / 2] = -n / 2;

    // Per spectral index: integer mode vector, |k|^2, mask, Parseval weight.
    mode_vectors_.resize(spectral_size_ * dim);
    k2_.resize(spectral_size_);
    mask_.resize(spectral_size_);
    weight_.resize(spectral_size_);
    const double kscale = 2.0 * std::numbers::pi / length;
    for (std::size_t idx = 0; idx < spectral_size_; ++idx) {
      std::size_t rest = idx;
      std::array<int, 3> m{0, 0, 0};
      const int last = static_cast<int>(rest % half_);
      rest /= half_;
      for (int d = dim - 2; d >= 0; --d) {
        m[d] = modes_[rest % n];
        rest /= n;
      }
      m[dim - 1] = last;
      double k2 = 0.0;
      bool keep = true;
      for (int d = 0; d < dim; ++d) {
        mode_vectors_[idx * dim + d] = m[d];
        const double k = kscale * m[d];
        k2 += k * k;
        if (3 * std::abs(m[d]) > n) keep = false;
      }
      k2_[idx] = k2;
      mask_[idx] = keep ? 1 : 0;
      // Half-complex storage holds one of each conjugate pair along the last
      // axis, except the self-conjugate planes 0 and n/2.
      weight_[idx] = (last == 0 || last == n / 2) ? 1.0 : 2.0;
    }

    plans_ = std::make_shared<detail::FftPlans>(dim, n);
  }

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double dx() const noexcept { return length_ / n_; }
  double cell_volume() const noexcept { return std::pow(dx(), dim_); }
  double volume() const noexcept { return std::pow(length_, dim_); }
  std::size_t size() const noexcept { return size_; }
  std::size_t spectral_size() const noexcept { return spectral_size_; }

  /// Integer frequency of FFT index i along a full axis (Nyquist as -n/2).
  std::span<const int> wavenumbers() const noexcept { return modes_; }
  /// Integer mode index of spectral entry `idx` along `axis`.
  int mode(std::size_t idx, int axis) const noexcept {
    return mode_vectors_[idx * dim_ + axis];
  }
  /// Physical wavenumber along `axis` used for first derivatives; the
  /// Nyquist mode has no odd derivative and maps to zero.
  double derivative_wavenumber(std::size_t idx, int axis) const noexcept {
    const int m = mode(idx, axis);
    if (2 * std::abs(m) == n_) return 0.0;
    return 2.0 * std::numbers::pi / length_ * m;
  }
  double k_squared(std::size_t idx) const noexcept { return k2_[idx]; }
  bool dealias_keeps(std::size_t idx) const noexcept { return mask_[idx] != 0; }
  double parseval_weight(std::size_t idx) const noexcept { return weight_[idx]; }

  /// Coordinate of sample `flat` along `axis`.
  double coordinate(std::size_t flat, int axis) const noexcept {
    std::size_t stride = 1;
    for (int d = dim_ - 1; d > axis; --d) stride *= static_cast<std::size_t>(n_);
    return dx() * static_cast<double>((flat / stride) % n_);
  }

  std::vector<Complex> forward(std::span<const double> samples) const {
    std::vector<Complex> out(spectral_size_);
    plans_->forward(samples.data(), out.data());
    return out;
  }

  /// Consumes the spectrum (c2r destroys its input).
  std::vector<double> inverse(std::vector<Complex> spectrum) const {
    std::vector<double> out(size_);
    plans_->inverse(spectrum.data(), out.data());
    const double scale = 1.0 / static_cast<double>(size_);
    for (double& v : out) v *= scale;
    return out;
  }

  friend bool operator==(const SpectralGrid& a, const SpectralGrid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  int dim_;
  int n_;
  double length_;
  std::size_t size_ = 0;
  std::size_t half_ = 0;
  std::size_t spectral_size_ = 0;
  std::vector<int> modes_;
  std::vector<int> mode_vectors_;
  std::vector<double> k2_;
  std::vector<unsigned char> mask_;
  std::vector<double> weight_;
  std::shared_ptr<const detail::FftPlans> plans_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

inline GridPtr make_grid(int dim, int n,
                         double length = 2.0 * std::numbers::pi) {
  return std::make_shared<const SpectralGrid>(dim, n, length);
}

}  // namespace twofluid
