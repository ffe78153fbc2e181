#include <doctest.h>

#include <algorithm>

#include "mrmoco/gridmath.hpp"
#include "test_helpers.hpp"

using namespace mrmoco;
using namespace mrmoco::gridmath;
using mrmoco::test::random_coords;
using mrmoco::test::random_image;
using mrmoco::test::rel_l2_error;

namespace {

// Independent on-grid oracle: naive centered DFT evaluated coordinate-free,
// distinct from both the gridding path and dft_oracle_forward's loop order.
std::vector<Complex> naive_centered_dft(const ComplexImage& img) {
  const int n = img.width;
  const int c = n / 2;
  std::vector<Complex> out(img.size());
  for (int my = 0; my < n; ++my) {
    for (int mx = 0; mx < n; ++mx) {
      Complex acc(0.0, 0.0);
      for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
          const double ph = -2.0 * kPi * ((mx - c) * (ix - c) + (my - c) * (iy - c)) / n;
          acc += img.at(ix, iy) * Complex(std::cos(ph), std::sin(ph));
        }
      }
      out[static_cast<std::size_t>(my) * n + mx] = acc;
    }
  }
  return out;
}

KCoords grid_coords(int n) {
  KCoords coords(static_cast<std::size_t>(n) * n);
  const double dk = 2.0 * kPi / n;
  const int c = n / 2;
  for (int my = 0; my < n; ++my) {
    for (int mx = 0; mx < n; ++mx) coords[static_cast<std::size_t>(my) * n + mx] = {dk * (mx - c), dk * (my - c)};
  }
  return coords;
}

}  // namespace

TEST_SUITE("gridmath") {

TEST_CASE("forward of a centered unit impulse is all ones") {
  const int n = 16;
  ComplexImage img(n, n);
  img.at(n / 2, n / 2) = Complex(1.0, 0.0);
  const auto coords = random_coords(57, 11, 1.5 * kPi);
  const auto out = nufft_forward(img, coords);
  for (const auto& v : out) {
    CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-5);
  }
}

TEST_CASE("forward matches the brute-force oracle on random input") {
  const auto img = random_image(16, 42);
  const auto coords = random_coords(200, 43);
  const auto fast = nufft_forward(img, coords);
  const auto exact = dft_oracle_forward(img, coords);
  CHECK(rel_l2_error(fast, exact) < 1e-5);
}

TEST_CASE("forward on exact Cartesian coordinates equals the centered FFT") {
  for (const int n : {8, 16, 32}) {
    const auto img = random_image(n, 100 + n);
    const auto fast = nufft_forward(img, grid_coords(n));
    const auto exact = naive_centered_dft(img);
    // exact on the grid thanks to the discrete deapodization
    CHECK(rel_l2_error(fast, exact) < 1e-10);
  }
}

TEST_CASE("centered_fft helper agrees with the naive centered DFT") {
  const int n = 16;
  auto img = random_image(n, 7);
  const auto exact = naive_centered_dft(img);
  centered_fft(img, -1);
  CHECK(rel_l2_error(img.data, exact) < 1e-12);
}

TEST_CASE("oracle agreement holds outside the [-pi, pi) box") {
  int cases = 0;
  for (const int n : {8, 16, 32}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto img = random_image(n, 1000 + seed);
      // up to |k| = pi*sqrt(2), the worst case a rotated trajectory produces
      const auto coords = random_coords(std::min<std::size_t>(512, 16u * n), 2000 + seed, kPi * 1.4143);
      const auto fast = nufft_forward(img, coords);
      const auto exact = dft_oracle_forward(img, coords);
      CHECK(rel_l2_error(fast, exact) < 1e-5);
      ++cases;
    }
  }
  CHECK(cases == 12);
}

TEST_CASE("forward is linear") {
  const int n = 16;
  const auto x = random_image(n, 1);
  const auto z = random_image(n, 2);
  const auto coords = random_coords(128, 3);
  const Complex a(0.7, -0.3), b(-1.1, 0.45);

  ComplexImage combo(n, n);
  for (std::size_t i = 0; i < combo.size(); ++i) combo.data[i] = a * x.data[i] + b * z.data[i];

  const auto lhs = nufft_forward(combo, coords);
  auto rhs = nufft_forward(x, coords);
  const auto fz = nufft_forward(z, coords);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * rhs[i] + b * fz[i];
  CHECK(rel_l2_error(lhs, rhs) < 1e-10);
}

TEST_CASE("adjoint of a single DC sample is a constant image") {
  const KCoords coords = {{0.0, 0.0}};
  const std::vector<Complex> samples = {Complex(1.0, 0.0)};
  const auto img = nufft_adjoint(samples, coords, 8);
  for (const auto& v : img.data) CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-6);
}

TEST_CASE("adjoint dot-product identity") {
  for (const int n : {8, 16, 32}) {
    const auto x = random_image(n, 10 + n);
    const auto coords = random_coords(3 * n, 20 + n, 1.2 * kPi);
    Rng rng(30 + n);
    std::vector<Complex> y(coords.size());
    for (auto& v : y) v = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));

    const auto ax = nufft_forward(x, coords);
    const auto aty = nufft_adjoint(y, coords, n);

    const Complex lhs = dot(ax, y);
    const Complex rhs = dot(x.data, aty.data);
    const double err = std::abs(lhs - rhs) / (l2_norm(x) * l2_norm(y));
    CHECK(err < 1e-6);
  }
}

TEST_CASE("adjoint of forward of an impulse through one coordinate has unit magnitudes") {
  const int n = 8;
  ComplexImage img(n, n);
  img.at(n / 2, n / 2) = Complex(1.0, 0.0);
  const KCoords coords = {{0.8, -0.45}};
  const auto y = nufft_forward(img, coords);
  const auto back = nufft_adjoint(y, coords, n);
  for (const auto& v : back.data) CHECK(std::abs(std::abs(v) - 1.0) < 2e-5);
}

TEST_CASE("oracle basics and reassociation") {
  const int n = 8;
  SUBCASE("zero image gives zero samples") {
    ComplexImage img(n, n);
    const auto out = dft_oracle_forward(img, random_coords(10, 5));
    for (const auto& v : out) CHECK(std::abs(v) == 0.0);
  }
  SUBCASE("impulse gives all ones") {
    ComplexImage img(n, n);
    img.at(n / 2, n / 2) = Complex(1.0, 0.0);
    const auto out = dft_oracle_forward(img, random_coords(10, 6));
    for (const auto& v : out) CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-12);
  }
  SUBCASE("column-major reassociation agrees") {
    const auto img = random_image(n, 77);
    const auto coords = random_coords(10, 78);
    const auto a = dft_oracle_forward(img, coords);
    // same sum accumulated column-by-column
    std::vector<Complex> b(coords.size());
    for (std::size_t j = 0; j < coords.size(); ++j) {
      Complex acc(0.0, 0.0);
      for (int ix = 0; ix < n; ++ix) {
        for (int iy = 0; iy < n; ++iy) {
          const double ph = -(coords[j].kx * (ix - n / 2) + coords[j].ky * (iy - n / 2));
          acc += img.at(ix, iy) * Complex(std::cos(ph), std::sin(ph));
        }
      }
      b[j] = acc;
    }
    CHECK(rel_l2_error(a, b) < 1e-13);
  }
}

TEST_CASE("error paths") {
  const auto img = random_image(8, 1);
  CHECK_THROWS_AS(nufft_forward(img, {}), std::invalid_argument);

  ComplexImage rect(8, 4);
  CHECK_THROWS_AS(nufft_forward(rect, random_coords(4, 2)), std::invalid_argument);

  CHECK_THROWS_AS(nufft_adjoint({Complex(1.0, 0.0)}, random_coords(2, 3), 8), std::invalid_argument);

  ComplexImage big(128, 128);
  CHECK_THROWS_AS(dft_oracle_forward(big, random_coords(4, 4)), std::invalid_argument);
}

}  // TEST_SUITE
