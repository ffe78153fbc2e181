#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mrmoco/gridmath.hpp"
#include "mrmoco/prior.hpp"
#include "test_helpers.hpp"

using namespace mrmoco;
using namespace mrmoco::prior;
using mrmoco::test::random_image;
using mrmoco::test::rel_l2_error;

namespace {

std::vector<double> const_variance(std::size_t count, double v) { return std::vector<double>(count, v); }

// closed-form log density of the sigma-smoothed Gaussian, both bases
double log_density(const ComplexImage& mean, const std::vector<double>& variance, const ComplexImage& x, double sigma,
                   GaussianBasis basis) {
  ComplexImage diff(x.width, x.height);
  for (std::size_t i = 0; i < x.size(); ++i) diff.data[i] = x.data[i] - mean.data[i];
  if (basis == GaussianBasis::kFourier) {
    gridmath::centered_fft(diff, -1);
    for (auto& z : diff.data) z /= x.width;  // orthonormal scaling
  }
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ll -= 0.5 * std::norm(diff.data[i]) / (variance[i] + sigma * sigma);
  return ll;
}

}  // namespace

TEST_SUITE("prior") {

TEST_CASE("standard normal score is -x") {
  const int n = 8;
  const auto x = random_image(n, 3);
  const ComplexImage mean(n, n);
  const auto s = gaussian_score(mean, const_variance(x.size(), 1.0), x, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(s.data[i] + x.data[i]) < 1e-14);
}

TEST_CASE("unit smoothing halves the standard normal score") {
  const int n = 8;
  const auto x = random_image(n, 4);
  const ComplexImage mean(n, n);
  const auto s = gaussian_score(mean, const_variance(x.size(), 1.0), x, 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(s.data[i] + 0.5 * x.data[i]) < 1e-14);
}

TEST_CASE("score vanishes at the mean") {
  const int n = 8;
  const auto mean = random_image(n, 5);
  for (const auto basis : {GaussianBasis::kPixel, GaussianBasis::kFourier}) {
    const auto s = gaussian_score(mean, const_variance(mean.size(), 0.7), mean, 0.3, basis);
    for (const auto& z : s.data) CHECK(std::abs(z) < 1e-12);
  }
}

TEST_CASE("gaussian score matches central finite differences of the log density") {
  const int n = 8;
  const auto mean = random_image(n, 6);
  const auto x = random_image(n, 7);
  Rng vrng(8);
  std::vector<double> variance(x.size());
  for (auto& v : variance) v = vrng.uniform(0.3, 2.0);
  const double sigma = 0.4;
  const double h = 1e-5;

  for (const auto basis : {GaussianBasis::kPixel, GaussianBasis::kFourier}) {
    const auto s = gaussian_score(mean, variance, x, sigma, basis);
    // probe a spread of components, real and imaginary parts
    for (std::size_t i = 0; i < x.size(); i += 7) {
      ComplexImage xp = x, xm = x;
      xp.data[i] += h;
      xm.data[i] -= h;
      const double fd_re =
          (log_density(mean, variance, xp, sigma, basis) - log_density(mean, variance, xm, sigma, basis)) / (2 * h);
      CHECK(std::abs(fd_re - s.data[i].real()) < 1e-6);

      xp = x;
      xm = x;
      xp.data[i] += Complex(0.0, h);
      xm.data[i] -= Complex(0.0, h);
      const double fd_im =
          (log_density(mean, variance, xp, sigma, basis) - log_density(mean, variance, xm, sigma, basis)) / (2 * h);
      CHECK(std::abs(fd_im - s.data[i].imag()) < 1e-6);
    }
  }
}

TEST_CASE("score norm scales exactly as ||x - mean||/(v + sigma^2)") {
  const int n = 8;
  const auto mean = random_image(n, 9);
  const auto x = random_image(n, 10);
  const double v = 0.8;
  const double sigma = 0.5;
  const auto s = gaussian_score(mean, const_variance(x.size(), v), x, sigma);
  ComplexImage diff(n, n);
  for (std::size_t i = 0; i < x.size(); ++i) diff.data[i] = x.data[i] - mean.data[i];
  CHECK(l2_norm(s) == doctest::Approx(l2_norm(diff) / (v + sigma * sigma)).epsilon(1e-12));
}

TEST_CASE("nonpositive variance or shape mismatch throws") {
  const int n = 8;
  const auto x = random_image(n, 11);
  const ComplexImage mean(n, n);
  CHECK_THROWS_AS(gaussian_score(mean, const_variance(x.size(), 0.0), x, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_score(mean, const_variance(x.size() - 1, 1.0), x, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_score(ComplexImage(4, 4), const_variance(x.size(), 1.0), x, 0.1), std::invalid_argument);
}

TEST_CASE("geometric schedule closed forms") {
  SUBCASE("ratio is exact for (10, 0.01, 4)") {
    const auto sched = geometric_schedule(10.0, 0.01, 4, 5, 2e-5);
    REQUIRE(sched.num_levels() == 4);
    const double ratio = std::cbrt(0.01 / 10.0);
    CHECK(sched.levels[0] == doctest::Approx(10.0));
    CHECK(sched.levels[1] == doctest::Approx(10.0 * ratio).epsilon(1e-12));
    CHECK(sched.levels[2] == doctest::Approx(10.0 * ratio * ratio).epsilon(1e-12));
    CHECK(sched.levels[3] == doctest::Approx(0.01).epsilon(1e-12));
  }
  SUBCASE("two levels are exactly the endpoints") {
    const auto sched = geometric_schedule(1.0, 0.25, 2, 3, 1e-4);
    CHECK(sched.levels == std::vector<double>{1.0, 0.25});
  }
  SUBCASE("final step size equals the base step") {
    const auto sched = geometric_schedule(1.0, 0.01, 10, 30, 2e-5);
    CHECK(sched.step_size(9) == doctest::Approx(2e-5).epsilon(1e-12));
    CHECK(sched.step_size(0) == doctest::Approx(2e-5 * 1e4).epsilon(1e-10));
  }
  SUBCASE("spacing is geometric to 1e-12") {
    const auto sched = geometric_schedule(1.0, 0.01, 10, 30, 2e-5);
    const double r0 = sched.levels[1] / sched.levels[0];
    for (int i = 1; i + 1 < sched.num_levels(); ++i) {
      CHECK(std::abs(sched.levels[i + 1] / sched.levels[i] - r0) < 1e-12);
    }
    for (double v : sched.levels) CHECK(v > 0.0);
    for (int i = 0; i + 1 < sched.num_levels(); ++i) CHECK(sched.levels[i] > sched.levels[i + 1]);
  }
  SUBCASE("invalid bounds throw") {
    CHECK_THROWS_AS(geometric_schedule(0.01, 1.0, 4, 5, 1e-5), std::invalid_argument);
    CHECK_THROWS_AS(geometric_schedule(1.0, 0.0, 4, 5, 1e-5), std::invalid_argument);
    CHECK_THROWS_AS(geometric_schedule(1.0, 0.1, 1, 5, 1e-5), std::invalid_argument);
  }
}

TEST_CASE("identity denoiser has zero score") {
  const auto d = ConvDenoiser::from_kernels({{1, {1.0}}});
  const auto x = random_image(8, 12);
  const auto s = denoiser_score(d, x, 0.7);
  for (const auto& z : s.data) CHECK(std::abs(z) < 1e-14);
}

TEST_CASE("smoothing denoiser score follows the Tweedie formula on a 4x4 case") {
  const auto d = shipped_smoothing_denoiser();
  const int n = 4;
  ComplexImage x(n, n);
  x.at(1, 2) = Complex(1.0, 0.0);  // impulse off center
  const double sigma = 0.5;
  const auto s = denoiser_score(d, x, sigma);

  // hand-applied 3x3 binomial circular convolution
  const double k[3][3] = {{1 / 16.0, 2 / 16.0, 1 / 16.0},
                          {2 / 16.0, 4 / 16.0, 2 / 16.0},
                          {1 / 16.0, 2 / 16.0, 1 / 16.0}};
  ComplexImage dx(n, n);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      Complex acc(0.0, 0.0);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dxx = -1; dxx <= 1; ++dxx) acc += k[dy + 1][dxx + 1] * x.at((ix + dxx + n) % n, (iy + dy + n) % n);
      }
      dx.at(ix, iy) = acc;
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(s.data[i] - (dx.data[i] - x.data[i]) / (sigma * sigma)) < 1e-14);
  }
  // at the impulse the score points from the spike toward its local average
  CHECK(s.at(1, 2).real() < 0.0);
  CHECK(s.at(2, 2).real() > 0.0);
}

TEST_CASE("denoiser score decays like 1/sigma^2 for large sigma") {
  const auto d = shipped_smoothing_denoiser();
  const auto x = random_image(8, 13);
  const double a = l2_norm(denoiser_score(d, x, 10.0)) * 100.0;
  const double b = l2_norm(denoiser_score(d, x, 100.0)) * 10000.0;
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
  CHECK_THROWS_AS(denoiser_score(d, x, 0.0), std::invalid_argument);
}

TEST_CASE("denoiser parameter file round-trips and rejects garbage") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "mrmoco_prior_test";
  fs::create_directories(dir);
  const auto file = dir / "denoiser.bin";

  const auto d = shipped_smoothing_denoiser();
  d.save(file);
  const auto loaded = ConvDenoiser::load(file);
  const auto x = random_image(8, 14);
  CHECK(rel_l2_error(loaded.apply(x), d.apply(x)) < 1e-15);

  const auto bad = dir / "bad.bin";
  {
    std::ofstream out(bad, std::ios::binary);
    out << "NOTADENO";
  }
  CHECK_THROWS_AS(ConvDenoiser::load(bad), std::runtime_error);
  CHECK_THROWS_AS(ConvDenoiser::load(dir / "missing.bin"), std::runtime_error);
}

TEST_CASE("power-law spectrum is positive and radially monotone") {
  const int n = 16;
  const auto v = power_law_spectrum(n, 10.0, 0.5, 3.0, 1e-3);
  REQUIRE(v.size() == static_cast<std::size_t>(n) * n);
  for (double x : v) CHECK(x > 0.0);
  // DC bin carries the largest variance
  const double dc = v[static_cast<std::size_t>(n / 2) * n + n / 2];
  for (double x : v) CHECK(x <= dc + 1e-15);
}

}  // TEST_SUITE
