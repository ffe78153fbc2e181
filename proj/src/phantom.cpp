#include "mrmoco/phantom.hpp"

#include <cmath>

#include "mrmoco/rng.hpp"

namespace mrmoco::phantom {

namespace {

struct Ellipse {
  double intensity;
  double a, b;      // semi-axes
  double x0, y0;    // center
  double phi_deg;   // rotation
};

// Modified Shepp-Logan table (Toft's improved-contrast variant).
constexpr Ellipse kSheppLogan[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.605, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

}  // namespace

double shepp_logan_value(double u, double v) {
  double val = 0.0;
  for (const auto& e : kSheppLogan) {
    const double c = std::cos(deg_to_rad(e.phi_deg));
    const double s = std::sin(deg_to_rad(e.phi_deg));
    const double du = u - e.x0;
    const double dv = v - e.y0;
    const double ue = du * c + dv * s;
    const double ve = -du * s + dv * c;
    if (ue * ue / (e.a * e.a) + ve * ve / (e.b * e.b) <= 1.0) val += e.intensity;
  }
  return val;
}

ComplexImage shepp_logan(int n, std::uint64_t phase_seed) {
  if (n < 8) throw std::invalid_argument("shepp_logan: n must be >= 8");

  Rng rng(phase_seed);
  // Low-order polynomial phase over normalized coordinates; coefficients keep
  // the total phase excursion within roughly +-1.5 rad.
  const double c00 = rng.uniform(-0.5, 0.5);
  const double c10 = rng.uniform(-0.5, 0.5);
  const double c01 = rng.uniform(-0.5, 0.5);
  const double c20 = rng.uniform(-0.5, 0.5);
  const double c11 = rng.uniform(-0.5, 0.5);
  const double c02 = rng.uniform(-0.5, 0.5);

  ComplexImage img(n, n);
  const int c = n / 2;
  double max_mag = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double u = static_cast<double>(ix - c) / (n / 2.0);
      const double v = static_cast<double>(iy - c) / (n / 2.0);
      const double mag = shepp_logan_value(u, v);
      max_mag = std::max(max_mag, mag);
      const double ph = c00 + c10 * u + c01 * v + c20 * u * u + c11 * u * v + c02 * v * v;
      img.at(ix, iy) = mag * Complex(std::cos(ph), std::sin(ph));
    }
  }
  if (max_mag > 0.0) {
    for (auto& z : img.data) z /= max_mag;
  }
  return img;
}

CoilMaps birdcage_maps(int n, int num_coils) {
  if (num_coils < 1) throw std::invalid_argument("birdcage_maps: num_coils must be >= 1");
  if (n < 2) throw std::invalid_argument("birdcage_maps: n must be >= 2");

  // Coil centers on a ring of radius 0.85 around the unit-normalized FOV
  // [-0.5, 0.5)^2, each with a phase offset matching its ring position.
  const double ring_radius = 0.85;
  CoilMaps maps;
  maps.num_coils = num_coils;
  maps.maps.reserve(num_coils);
  const int c = n / 2;
  for (int coil = 0; coil < num_coils; ++coil) {
    const double ang = 2.0 * kPi * coil / num_coils;
    const double cx = ring_radius * std::cos(ang);
    const double cy = ring_radius * std::sin(ang);
    ComplexImage m(n, n);
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        const double x = static_cast<double>(ix - c) / n;
        const double y = static_cast<double>(iy - c) / n;
        const double dx = x - cx;
        const double dy = y - cy;
        const double r = std::sqrt(dx * dx + dy * dy);
        const double ph = std::atan2(dy, dx) - ang;
        m.at(ix, iy) = (1.0 / r) * Complex(std::cos(ph), std::sin(ph));
      }
    }
    maps.maps.push_back(std::move(m));
  }

  // RSS-normalize so the combined sensitivity is exactly 1 everywhere.
  const std::size_t npix = maps.maps[0].size();
  for (std::size_t i = 0; i < npix; ++i) {
    double rss = 0.0;
    for (const auto& m : maps.maps) rss += std::norm(m.data[i]);
    rss = std::sqrt(rss);
    for (auto& m : maps.maps) m.data[i] /= rss;
  }
  return maps;
}

SampledTrajectory cartesian_trajectory(int n, int etl, double accel) {
  if (etl < 1 || n < etl) throw std::invalid_argument("cartesian_trajectory: invalid etl");
  if (accel < 1.0) throw std::invalid_argument("cartesian_trajectory: accel must be >= 1");

  const double trs_exact = n / (etl * accel);
  const int num_trs = static_cast<int>(std::lround(trs_exact));
  if (num_trs < 1 || std::abs(trs_exact - num_trs) > 1e-9) {
    throw std::invalid_argument("cartesian_trajectory: n must be divisible by etl * accel");
  }
  const int num_lines = num_trs * etl;

  // Equispaced selected PE lines; exact multiples of R when R is integer.
  std::vector<int> lines(num_lines);
  for (int j = 0; j < num_lines; ++j) lines[j] = static_cast<int>(std::lround(j * accel));

  SampledTrajectory traj;
  traj.etl = etl;
  traj.accel = accel;
  traj.grid_n = n;
  traj.coords.reserve(static_cast<std::size_t>(num_lines) * n);
  traj.tr_bounds.reserve(num_trs);
  const double dk = 2.0 * kPi / n;
  const int c = n / 2;
  for (int tr = 0; tr < num_trs; ++tr) {
    TrRange range;
    range.begin = traj.coords.size();
    for (int j = tr; j < num_lines; j += num_trs) {
      const double ky = dk * (lines[j] - c);
      for (int m = 0; m < n; ++m) {
        traj.coords.push_back({dk * (m - c), ky});
      }
    }
    range.end = traj.coords.size();
    traj.tr_bounds.push_back(range);
  }
  return traj;
}

}  // namespace mrmoco::phantom
