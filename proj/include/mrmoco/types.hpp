#ifndef MRMOCO_TYPES_HPP
#define MRMOCO_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mrmoco {

using Complex = std::complex<double>;

// Complex-valued image on an N x N grid, stored row-major. Pixel (ix, iy)
// sits at spatial coordinate (ix - width/2, iy - height/2), i.e. integer
// offsets from the grid center.
struct ComplexImage {
  int width = 0;
  int height = 0;
  std::vector<Complex> data;

  ComplexImage() = default;
  ComplexImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h) {}

  static ComplexImage zeros(int n) { return ComplexImage(n, n); }

  Complex& at(int ix, int iy) { return data[static_cast<std::size_t>(iy) * width + ix]; }
  const Complex& at(int ix, int iy) const { return data[static_cast<std::size_t>(iy) * width + ix]; }

  std::size_t size() const { return data.size(); }
  bool square() const { return width == height && width > 0; }
};

struct KPoint {
  double kx = 0.0;
  double ky = 0.0;
};

// k-space coordinates in radians per pixel. Trajectory generation keeps them
// in [-pi, pi); rotation may move them outside that box and transforms must
// still evaluate them as-is.
using KCoords = std::vector<KPoint>;

inline double l2_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline double l2_norm(const ComplexImage& img) { return l2_norm(img.data); }

inline Complex dot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

}  // namespace mrmoco

#endif
