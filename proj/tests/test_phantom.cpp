#include <doctest.h>

#include <cmath>
#include <set>

#include "mrmoco/phantom.hpp"

using namespace mrmoco;
using namespace mrmoco::phantom;

TEST_SUITE("phantom") {

TEST_CASE("shepp_logan magnitude is normalized and nonzero") {
  const auto img = shepp_logan(64, 0);
  double max_mag = 0.0;
  double sum = 0.0;
  for (const auto& z : img.data) {
    max_mag = std::max(max_mag, std::abs(z));
    sum += std::abs(z);
  }
  CHECK(max_mag == doctest::Approx(1.0));
  CHECK(sum > 1.0);
}

TEST_CASE("shepp_logan is deterministic per seed") {
  const auto a = shepp_logan(64, 5);
  const auto b = shepp_logan(64, 5);
  const auto c = shepp_logan(64, 6);
  CHECK(a.data == b.data);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.data[i] != c.data[i]) {
      differs = true;
      break;
    }
  }
  CHECK(differs);  // phase map must depend on the seed
}

TEST_CASE("ellipse sum matches the published table at probe points") {
  // Values assembled directly from the modified Shepp-Logan table: summed
  // intensities of the ellipses covering each probe point.
  CHECK(shepp_logan_value(0.0, 0.0) == doctest::Approx(0.2));         // 1 - 0.8
  CHECK(shepp_logan_value(0.0, 0.35) == doctest::Approx(0.3));        // 1 - 0.8 + 0.1
  CHECK(shepp_logan_value(0.22, 0.0) == doctest::Approx(0.0));        // ventricle: 1 - 0.8 - 0.2
  CHECK(shepp_logan_value(-0.22, 0.0) == doctest::Approx(0.0));
  CHECK(shepp_logan_value(0.0, -0.605) == doctest::Approx(0.3));      // small bottom dot
  CHECK(shepp_logan_value(0.0, 0.9) == doctest::Approx(1.0));         // skull ring only
  CHECK(shepp_logan_value(0.0, -0.98) == doctest::Approx(0.0));       // outside everything
  // phantom magnitudes reflect the table (no seeded contrast jitter)
  const auto img = shepp_logan(128, 3);
  CHECK(std::abs(img.at(64, 64)) == doctest::Approx(0.2));
}

TEST_CASE("single-coil birdcage map has unit magnitude") {
  const auto maps = birdcage_maps(32, 1);
  REQUIRE(maps.num_coils == 1);
  for (const auto& z : maps.maps[0].data) CHECK(std::abs(z) == doctest::Approx(1.0));
}

TEST_CASE("birdcage RSS is within the contract over the central region") {
  const int n = 64;
  const auto maps = birdcage_maps(n, 8);
  for (int iy = n / 8; iy < 7 * n / 8; ++iy) {
    for (int ix = n / 8; ix < 7 * n / 8; ++ix) {
      double rss = 0.0;
      for (const auto& m : maps.maps) rss += std::norm(m.at(ix, iy));
      rss = std::sqrt(rss);
      CHECK(rss > 0.9);
      CHECK(rss < 1.1);
    }
  }
}

TEST_CASE("birdcage maps are smooth") {
  const int n = 64;
  const auto maps = birdcage_maps(n, 8);
  double max_grad = 0.0;
  for (const auto& m : maps.maps) {
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix + 1 < n; ++ix) max_grad = std::max(max_grad, std::abs(m.at(ix + 1, iy) - m.at(ix, iy)));
    }
    for (int iy = 0; iy + 1 < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) max_grad = std::max(max_grad, std::abs(m.at(ix, iy + 1) - m.at(ix, iy)));
    }
  }
  CHECK(max_grad < 0.2);
}

TEST_CASE("trajectory TR counts follow the protocol arithmetic") {
  CHECK(cartesian_trajectory(384, 8, 1.0).num_trs() == 48);
  CHECK(cartesian_trajectory(384, 8, 4.0).num_trs() == 12);
  CHECK(cartesian_trajectory(384, 8, 4.8).num_trs() == 10);

  const auto t = cartesian_trajectory(64, 8, 4.0);
  CHECK(t.num_trs() == 2);
  CHECK(t.coords.size() == 16u * 64u);
}

TEST_CASE("trajectory coordinates sit on the Cartesian grid") {
  const int n = 64;
  const auto t = cartesian_trajectory(n, 8, 2.0);
  const double dk = 2.0 * kPi / n;
  for (const auto& p : t.coords) {
    const double mx = p.kx / dk;
    const double my = p.ky / dk;
    CHECK(std::abs(mx - std::round(mx)) < 1e-12);
    CHECK(std::abs(my - std::round(my)) < 1e-12);
    CHECK(p.kx >= -kPi - 1e-12);
    CHECK(p.kx < kPi);
    CHECK(p.ky >= -kPi - 1e-12);
    CHECK(p.ky < kPi);
  }
}

TEST_CASE("selected lines are equispaced and partitioned across TRs") {
  const int n = 64;
  const int etl = 8;
  for (const double accel : {1.0, 2.0, 4.0}) {
    const auto t = cartesian_trajectory(n, etl, accel);
    const double dk = 2.0 * kPi / n;

    // collect the PE index of every line, per TR
    std::set<int> seen;
    for (int tr = 0; tr < t.num_trs(); ++tr) {
      const auto& r = t.tr_bounds[tr];
      CHECK((r.end - r.begin) == static_cast<std::size_t>(etl) * n);
      for (std::size_t j = r.begin; j < r.end; j += n) {
        const int line = static_cast<int>(std::lround(t.coords[j].ky / dk)) + n / 2;
        CHECK_FALSE(seen.count(line));
        seen.insert(line);
      }
    }
    // equispaced with gap exactly R, full partition
    REQUIRE(static_cast<int>(seen.size()) == static_cast<int>(n / accel));
    int prev = -1;
    for (int line : seen) {
      if (prev >= 0) CHECK(line - prev == static_cast<int>(accel));
      prev = line;
    }
  }
}

TEST_CASE("each TR's lines spread across the PE axis") {
  const auto t = cartesian_trajectory(64, 8, 4.0);
  const double dk = 2.0 * kPi / 64;
  for (int tr = 0; tr < t.num_trs(); ++tr) {
    const auto& r = t.tr_bounds[tr];
    double lo = 1e9, hi = -1e9;
    for (std::size_t j = r.begin; j < r.end; j += 64) {
      lo = std::min(lo, t.coords[j].ky / dk);
      hi = std::max(hi, t.coords[j].ky / dk);
    }
    CHECK(hi - lo > 32);  // spans at least half the axis
  }
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(shepp_logan(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(birdcage_maps(32, 0), std::invalid_argument);
  CHECK_THROWS_AS(cartesian_trajectory(60, 8, 4.0), std::invalid_argument);  // 60/(32) not integral
  CHECK_THROWS_AS(cartesian_trajectory(64, 8, 0.5), std::invalid_argument);
}

}  // TEST_SUITE
