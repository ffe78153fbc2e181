#include "mrmoco/gridmath.hpp"

#include <algorithm>
#include <cmath>

#include "fft_internal.hpp"

namespace mrmoco::gridmath {

namespace {

// Modified Bessel function I0 by power series; converges quickly for the
// argument range the kernel uses (|x| <= beta ~ 14).
double bessel_i0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

constexpr int kTableIntervals = 4096;

inline int wrap(int m, int g) {
  int r = m % g;
  return r < 0 ? r + g : r;
}

}  // namespace

Nufft::Nufft(int grid_size) : n_(grid_size) {
  if (grid_size < 2) throw std::invalid_argument("Nufft: grid size must be >= 2");
  os_n_ = static_cast<int>(kOversampling * grid_size);

  // Beatty et al. kernel shape parameter for this width/oversampling pair.
  const double w = kKernelWidth;
  const double os = kOversampling;
  beta_ = kPi * std::sqrt(w * w / (os * os) * std::pow(os - 0.5, 2.0) - 0.8);
  

  // The kernel I0(beta*sqrt(1-(2t/W)^2))/I0(beta) has a square-root
  // singularity in t at the support edge, so the lookup is tabulated in the
  // smooth variable m = sqrt(1-(2t/W)^2) where it is analytic. One pad node
  // on each side serves the cubic interpolation stencil.
  table_step_inv_ = kTableIntervals;
  const double i0b = bessel_i0(beta_);
  kernel_table_.resize(kTableIntervals + 4);
  for (int j = 0; j < static_cast<int>(kernel_table_.size()); ++j) {
    const double m = std::clamp((j - 1.0) / kTableIntervals, 0.0, 1.0);
    kernel_table_[j] = bessel_i0(beta_ * m) / i0b;
  }
  // Pad nodes for the cubic stencil: even mirror at m = 0 (I0 is even),
  // linear continuation past m = 1 where the kernel peak has nonzero slope.
  kernel_table_[0] = kernel_table_[2];
  kernel_table_[kTableIntervals + 2] = 2.0 * kernel_table_[kTableIntervals + 1] - kernel_table_[kTableIntervals];
  kernel_table_[kTableIntervals + 3] = 3.0 * kernel_table_[kTableIntervals + 1] - 2.0 * kernel_table_[kTableIntervals];

  // Discrete deapodization: divide by the DFT of the integer-sampled kernel.
  // This makes on-grid coordinates exact; it differs from the continuous
  // Fourier transform only by the kernel's (tiny) aliasing terms.
  deapod_.resize(n_);
  const int center = n_ / 2;
  const int half_taps = kKernelTaps / 2;
  for (int i = 0; i < n_; ++i) {
    const double nu = static_cast<double>(i - center) / os_n_;
    double k = kernel(0.0);
    for (int j = 1; j <= half_taps; ++j) k += 2.0 * kernel(static_cast<double>(j)) * std::cos(2.0 * kPi * j * nu);
    deapod_[i] = 1.0 / k;
  }
}

double Nufft::kernel(double t) const {
  // Slack on the support test: the kernel value at the closed-support edge is
  // nonzero, and rounding in the coordinate scaling must not flip an edge tap
  // to zero (the exact-on-grid property depends on it).
  double arg = 1.0 - std::pow(2.0 * std::abs(t) / kKernelWidth, 2.0);
  if (arg < -1e-9) return 0.0;
  arg = std::max(arg, 0.0);
  const double s = std::sqrt(arg) * table_step_inv_;
  const int i = std::min(static_cast<int>(s), kTableIntervals - 1);
  const double f = s - i;
  const double f0 = kernel_table_[i];
  const double f1 = kernel_table_[i + 1];
  const double f2 = kernel_table_[i + 2];
  const double f3 = kernel_table_[i + 3];
  // Catmull-Rom
  return 0.5 * (2.0 * f1 + f * (-f0 + f2) + f * f * (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) +
                f * f * f * (-f0 + 3.0 * f1 - 3.0 * f2 + f3));
}

Nufft::Spectrum Nufft::prepare(const ComplexImage& image) const {
  if (!image.square() || image.width != n_) throw std::invalid_argument("Nufft::prepare: image must be square and match the grid size");

  Spectrum spec;
  spec.n = n_;
  spec.os_n = os_n_;
  spec.grid.assign(static_cast<std::size_t>(os_n_) * os_n_, Complex(0.0, 0.0));

  const int off = os_n_ / 2 - n_ / 2;  // centered embedding
  for (int iy = 0; iy < n_; ++iy) {
    const double dy = deapod_[iy];
    for (int ix = 0; ix < n_; ++ix) {
      spec.grid[static_cast<std::size_t>(iy + off) * os_n_ + (ix + off)] = image.at(ix, iy) * (deapod_[ix] * dy);
    }
  }

  detail::fft2d_inplace(spec.grid, os_n_, os_n_, FFTW_FORWARD);

  // Fold the centered-input phase into the grid: Y_m = (-1)^(px+py) F_p with
  // p = m mod G, valid for all integer m because G is even.
  for (int py = 0; py < os_n_; ++py) {
    for (int px = 0; px < os_n_; ++px) {
      if ((px + py) & 1) spec.grid[static_cast<std::size_t>(py) * os_n_ + px] = -spec.grid[static_cast<std::size_t>(py) * os_n_ + px];
    }
  }
  return spec;
}

Nufft::CoordPlan Nufft::plan_coords(std::span<const KPoint> coords) const {
  CoordPlan plan;
  plan.count = coords.size();
  plan.px.resize(plan.count * kKernelTaps);
  plan.py.resize(plan.count * kKernelTaps);
  plan.wx.resize(plan.count * kKernelTaps);
  plan.wy.resize(plan.count * kKernelTaps);

  const double scale = os_n_ / (2.0 * kPi);
  const int g = os_n_;
  const int half = kKernelTaps / 2;
  for (std::size_t j = 0; j < plan.count; ++j) {
    const double ux = coords[j].kx * scale;
    const double uy = coords[j].ky * scale;
    // Window centered on the nearest grid point covers the closed kernel
    // support [-W/2, W/2] for any rounding of ux/uy.
    const int bx = static_cast<int>(std::floor(ux + 0.5));
    const int by = static_cast<int>(std::floor(uy + 0.5));
    for (int t = 0; t < kKernelTaps; ++t) {
      const int mx = bx - half + t;
      const int my = by - half + t;
      const std::size_t o = j * kKernelTaps + t;
      plan.wx[o] = kernel(ux - mx);
      plan.wy[o] = kernel(uy - my);
      plan.px[o] = wrap(mx, g);
      plan.py[o] = wrap(my, g);
    }
  }
  return plan;
}

void Nufft::sample_planned(const Spectrum& spec, const CoordPlan& plan, std::span<Complex> out) const {
  if (spec.os_n != os_n_) throw std::invalid_argument("Nufft::sample: spectrum from a different grid");
  if (out.size() != plan.count) throw std::invalid_argument("Nufft::sample: output size mismatch");

  const int g = os_n_;
  for (std::size_t j = 0; j < plan.count; ++j) {
    const std::size_t o = j * kKernelTaps;
    Complex acc(0.0, 0.0);
    for (int ty = 0; ty < kKernelTaps; ++ty) {
      const double wy = plan.wy[o + ty];
      if (wy == 0.0) continue;
      const Complex* row = spec.grid.data() + static_cast<std::size_t>(plan.py[o + ty]) * g;
      Complex rowacc(0.0, 0.0);
      for (int tx = 0; tx < kKernelTaps; ++tx) rowacc += plan.wx[o + tx] * row[plan.px[o + tx]];
      acc += wy * rowacc;
    }
    out[j] = acc;
  }
}

void Nufft::sample(const Spectrum& spec, std::span<const KPoint> coords, std::span<Complex> out) const {
  sample_planned(spec, plan_coords(coords), out);
}

Nufft::Accumulator Nufft::make_accumulator() const {
  Accumulator acc;
  acc.os_n = os_n_;
  acc.grid.assign(static_cast<std::size_t>(os_n_) * os_n_, Complex(0.0, 0.0));
  return acc;
}

void Nufft::scatter_planned(Accumulator& acc, const CoordPlan& plan, std::span<const Complex> samples) const {
  if (acc.os_n != os_n_) throw std::invalid_argument("Nufft::scatter: accumulator from a different grid");
  if (plan.count != samples.size()) throw std::invalid_argument("Nufft::scatter: samples/plan length mismatch");

  const int g = os_n_;
  for (std::size_t j = 0; j < plan.count; ++j) {
    const std::size_t o = j * kKernelTaps;
    const Complex v = samples[j];
    for (int ty = 0; ty < kKernelTaps; ++ty) {
      const double wy = plan.wy[o + ty];
      if (wy == 0.0) continue;
      Complex* row = acc.grid.data() + static_cast<std::size_t>(plan.py[o + ty]) * g;
      const Complex vy = wy * v;
      for (int tx = 0; tx < kKernelTaps; ++tx) row[plan.px[o + tx]] += plan.wx[o + tx] * vy;
    }
  }
}

void Nufft::scatter(Accumulator& acc, std::span<const KPoint> coords, std::span<const Complex> samples) const {
  if (coords.size() != samples.size()) throw std::invalid_argument("Nufft::scatter: samples/coords length mismatch");
  scatter_planned(acc, plan_coords(coords), samples);
}

ComplexImage Nufft::finish_adjoint(const Accumulator& acc) const {
  if (acc.os_n != os_n_) throw std::invalid_argument("Nufft::finish_adjoint: accumulator from a different grid");

  std::vector<Complex> grid = acc.grid;
  for (int py = 0; py < os_n_; ++py) {
    for (int px = 0; px < os_n_; ++px) {
      if ((px + py) & 1) grid[static_cast<std::size_t>(py) * os_n_ + px] = -grid[static_cast<std::size_t>(py) * os_n_ + px];
    }
  }

  detail::fft2d_inplace(grid, os_n_, os_n_, FFTW_BACKWARD);

  ComplexImage out(n_, n_);
  const int off = os_n_ / 2 - n_ / 2;
  for (int iy = 0; iy < n_; ++iy) {
    const double dy = deapod_[iy];
    for (int ix = 0; ix < n_; ++ix) {
      out.at(ix, iy) = grid[static_cast<std::size_t>(iy + off) * os_n_ + (ix + off)] * (deapod_[ix] * dy);
    }
  }
  return out;
}

std::vector<Complex> nufft_forward(const ComplexImage& image, const KCoords& coords) {
  if (coords.empty()) throw std::invalid_argument("nufft_forward: empty coordinate list");
  if (!image.square()) throw std::invalid_argument("nufft_forward: image must be square");
  Nufft nufft(image.width);
  const auto spec = nufft.prepare(image);
  std::vector<Complex> out(coords.size());
  nufft.sample(spec, coords, out);
  return out;
}

ComplexImage nufft_adjoint(const std::vector<Complex>& samples, const KCoords& coords, int grid_size) {
  if (samples.size() != coords.size()) throw std::invalid_argument("nufft_adjoint: samples/coords length mismatch");
  Nufft nufft(grid_size);
  auto acc = nufft.make_accumulator();
  nufft.scatter(acc, coords, samples);
  return nufft.finish_adjoint(acc);
}

std::vector<Complex> dft_oracle_forward(const ComplexImage& image, const KCoords& coords) {
  if (!image.square()) throw std::invalid_argument("dft_oracle_forward: image must be square");
  if (image.width > 64) throw std::invalid_argument("dft_oracle_forward: grid too large for the O(M N^2) oracle");

  const int n = image.width;
  const int c = n / 2;
  std::vector<Complex> out(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j) {
    Complex acc(0.0, 0.0);
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        const double phase = -(coords[j].kx * (ix - c) + coords[j].ky * (iy - c));
        acc += image.at(ix, iy) * Complex(std::cos(phase), std::sin(phase));
      }
    }
    out[j] = acc;
  }
  return out;
}

void centered_fft(ComplexImage& image, int sign) {
  if (!image.square()) throw std::invalid_argument("centered_fft: image must be square");
  const int n = image.width;
  const int h = n / 2;

  std::vector<Complex> raw(image.data.size());
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      raw[static_cast<std::size_t>((iy + h) % n) * n + (ix + h) % n] = image.at(ix, iy);
    }
  }
  detail::fft2d_inplace(raw, n, n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      image.at(ix, iy) = raw[static_cast<std::size_t>((iy + h) % n) * n + (ix + h) % n];
    }
  }
}

}  // namespace mrmoco::gridmath
