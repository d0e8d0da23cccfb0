#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "support.hpp"
#include "twofluid/field.hpp"
#include "twofluid/presets.hpp"

using namespace twofluid;
using testing_support::rel_err;
using testing_support::Uniform;

namespace {

const double kPi = std::numbers::pi;

ScalarField sin_x(const GridPtr& g, int k = 1) {
  return ScalarField::from_function(g, [k](std::span<const double> x) { return std::sin(k * x[0]); });
}

// Band-limited field with random coefficients on modes |k_i| <= kmax.
ScalarField random_field(const GridPtr& g, std::uint64_t seed, int kmax) {
  presets::UniformStream rng(seed);
  const auto modes = presets::half_space_modes(g->dim(), kmax);
  std::vector<double> a(modes.size()), b(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    a[m] = rng();
    b[m] = rng();
  }
  return ScalarField::from_function(g, [&](std::span<const double> x) {
    double v = 0.3;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      double phase = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) phase += modes[m][d] * x[d];
      v += a[m] * std::cos(phase) + b[m] * std::sin(phase);
    }
    return v;
  });
}

double max_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }

}  // namespace

TEST(SpectralGrid, Validation) {
  EXPECT_THROW(SpectralGrid(0, 16), InvalidConfig);
  EXPECT_THROW(SpectralGrid(4, 16), InvalidConfig);
  EXPECT_THROW(SpectralGrid(2, 6), InvalidConfig);
  EXPECT_THROW(SpectralGrid(2, 17), InvalidConfig);
  EXPECT_THROW(SpectralGrid(2, 16, -1.0), InvalidConfig);
  const SpectralGrid g(3, 8);
  EXPECT_EQ(g.size(), 512u);
  EXPECT_EQ(g.spectral_size(), 8u * 8u * 5u);
}

TEST(SpectralGrid, DealiasMaskDropsHighModes) {
  const SpectralGrid g(2, 12);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const bool high = 3 * std::abs(g.mode(i, 0)) > 12 || 3 * std::abs(g.mode(i, 1)) > 12;
    EXPECT_EQ(g.dealias_keeps(i), !high);
  }
}

TEST(SpectralGrid, ForwardMatchesNaiveDft) {
  for (int dim : {1, 2}) {
    const auto g = make_grid(dim, 8);
    const auto f = random_field(g, 11, 3);
    const auto s = g->forward(f.values());
    for (std::size_t idx = 0; idx < g->spectral_size(); ++idx) {
      std::complex<double> ref = 0.0;
      for (std::size_t i = 0; i < g->size(); ++i) {
        double phase = 0.0;
        for (int d = 0; d < dim; ++d) phase += g->mode(idx, d) * g->coordinate(i, d);
        ref += f[i] * std::polar(1.0, -phase);
      }
      EXPECT_NEAR(std::abs(s[idx] - ref), 0.0, 1e-12 * g->size());
    }
  }
}

TEST(Field, DdxOfSine) {
  const auto g = make_grid(2, 32);
  const auto d = field::ddx(sin_x(g), 0);
  const auto c = ScalarField::from_function(g, [](std::span<const double> x) { return std::cos(x[0]); });
  EXPECT_LE(max_diff(d, c), 1e-12);
  EXPECT_LE(field::ddx(sin_x(g), 1).max_abs(), 1e-12);
}

TEST(Field, AxisOutOfRange) {
  const auto g = make_grid(2, 16);
  EXPECT_THROW(field::ddx(ScalarField(g), 2), AxisOutOfRange);
  EXPECT_THROW(field::ddx(ScalarField(g), -1), AxisOutOfRange);
}

TEST(Field, GradientOfConstantVanishes) {
  const auto g = make_grid(3, 8);
  for (const auto& c : field::gradient(ScalarField(g, 2.5))) EXPECT_LE(c.max_abs(), 1e-15);
}

TEST(Field, DivergenceOfGradientIsLaplacian) {
  for (int dim : {1, 2, 3}) {
    const auto g = make_grid(dim, dim == 3 ? 16 : 32);
    const auto f = random_field(g, 3 + dim, 4);
    const auto a = field::divergence(field::gradient(f));
    const auto b = field::laplacian(f);
    EXPECT_LE(max_diff(a, b), 1e-12 * b.max_abs()) << "dim " << dim;
  }
}

TEST(Field, LaplacianAgreesWithSecondOrderStencil) {
  const int n = 128;
  const auto g = make_grid(2, n);
  const auto f = random_field(g, 5, 2);
  const auto lap = field::laplacian(f);
  const double h = g->dx();
  auto at = [&](int i, int j) { return f[((i + n) % n) * n + (j + n) % n]; };
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double fd = (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4 * at(i, j)) / (h * h);
      worst = std::max(worst, std::abs(fd - lap[i * n + j]));
    }
  }
  EXPECT_LE(worst, 1e-3 * lap.max_abs());
}

TEST(Field, DealiasExamples) {
  const int n = 32;
  const auto g = make_grid(1, n);
  EXPECT_LE(field::dealias(sin_x(g, n / 2 - 1)).max_abs(), 1e-14);
  EXPECT_LE(max_diff(field::dealias(sin_x(g)), sin_x(g)), 1e-14);
  const auto f = random_field(make_grid(2, 16), 9, 7);
  const auto once = field::dealias(f);
  EXPECT_LE(max_diff(field::dealias(once), once), 1e-14);
}

TEST(Field, ProductOfResolvedModesIsExact) {
  const auto g = make_grid(1, 32);
  const auto p = field::product(sin_x(g), sin_x(g));
  const auto ref = ScalarField::from_function(g, [](std::span<const double> x) {
    return 0.5 * (1.0 - std::cos(2.0 * x[0]));
  });
  EXPECT_LE(max_diff(p, ref), 1e-15);
}

TEST(Field, InverseLaplacianRemovesMean) {
  const auto g = make_grid(2, 32);
  const auto f = random_field(g, 21, 4);
  const auto back = field::inverse_laplacian(field::laplacian(f));
  EXPECT_LE(max_diff(back + 0.3, f), 1e-13);
}

TEST(Sobolev, SineExamples) {
  const auto g = make_grid(1, 32);
  EXPECT_NEAR(field::sobolev_norm_squared(sin_x(g), 0), kPi, 1e-13);
  EXPECT_NEAR(field::sobolev_norm_squared(sin_x(g), 1), 2.0 * kPi, 1e-13);
  EXPECT_THROW(field::sobolev_norm(sin_x(g), 7), InvalidConfig);
}

TEST(Sobolev, MatchesPhysicalSpaceDerivativeSums) {
  for (int dim : {1, 2, 3}) {
    const auto g = make_grid(dim, 16);
    const auto f = random_field(g, 40 + dim, 4);
    double oracle = field::inner(f, f);
    for (int i = 0; i < dim; ++i) {
      const auto di = field::ddx(f, i);
      oracle += field::inner(di, di);
      for (int l = 0; l < dim; ++l) {
        const auto dil = field::ddx(di, l);
        oracle += field::inner(dil, dil);
      }
    }
    EXPECT_LE(rel_err(field::sobolev_norm_squared(f, 2), oracle), 1e-10) << "dim " << dim;
  }
}

TEST(Sobolev, ParsevalAndRoundTrip) {
  for (int dim : {1, 2, 3}) {
    const auto g = make_grid(dim, dim == 3 ? 8 : 16);
    Uniform rng(77 + dim);
    std::vector<double> v(g->size());
    for (double& x : v) x = rng(-1.0, 1.0);
    const ScalarField f(g, v);
    double physical = 0.0;
    for (double x : v) physical += x * x;
    physical *= g->cell_volume();
    EXPECT_LE(rel_err(field::sobolev_norm_squared(f, 0), physical), 1e-12);
    const auto back = g->inverse(g->forward(f.values()));
    for (std::size_t i = 0; i < v.size(); ++i) ASSERT_NEAR(back[i], v[i], 1e-13);
  }
}

TEST(Sobolev, MonotoneInIndex) {
  Uniform rng(5);
  const auto g = make_grid(2, 16);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(g->size());
    for (double& x : v) x = rng(-1.0, 1.0);
    const ScalarField f(g, v);
    for (int s = 0; s < 6; ++s) ASSERT_GE(field::sobolev_norm(f, s + 1), field::sobolev_norm(f, s));
  }
}

TEST(VectorFieldTest, RequiresOneComponentPerAxis) {
  const auto g = make_grid(2, 16);
  EXPECT_THROW(VectorField(std::vector<ScalarField>{ScalarField(g)}), InvalidConfig);
  const VectorField v(g, 1.0);
  EXPECT_EQ(v.dim(), 2);
  EXPECT_DOUBLE_EQ(v.max_norm(), std::sqrt(2.0));
}
