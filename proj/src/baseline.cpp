#include "mrmoco/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "mrmoco/rng.hpp"

namespace mrmoco::baseline {

namespace {

// Daubechies-4 analysis filters (orthonormal, periodized).
const double kSqrt3 = std::sqrt(3.0);
const double kNorm = 4.0 * std::sqrt(2.0);
const double kH[4] = {(1.0 + kSqrt3) / kNorm, (3.0 + kSqrt3) / kNorm, (3.0 - kSqrt3) / kNorm, (1.0 - kSqrt3) / kNorm};
const double kG[4] = {kH[3], -kH[2], kH[1], -kH[0]};

void analyze_1d(Complex* x, int stride, int len, std::vector<Complex>& tmp) {
  tmp.resize(len);
  const int half = len / 2;
  for (int i = 0; i < half; ++i) {
    Complex a(0.0, 0.0), d(0.0, 0.0);
    for (int t = 0; t < 4; ++t) {
      const Complex v = x[((2 * i + t) % len) * static_cast<std::ptrdiff_t>(stride)];
      a += kH[t] * v;
      d += kG[t] * v;
    }
    tmp[i] = a;
    tmp[half + i] = d;
  }
  for (int i = 0; i < len; ++i) x[i * static_cast<std::ptrdiff_t>(stride)] = tmp[i];
}

void synthesize_1d(Complex* x, int stride, int len, std::vector<Complex>& tmp) {
  tmp.assign(len, Complex(0.0, 0.0));
  const int half = len / 2;
  for (int i = 0; i < half; ++i) {
    const Complex a = x[i * static_cast<std::ptrdiff_t>(stride)];
    const Complex d = x[(half + i) * static_cast<std::ptrdiff_t>(stride)];
    for (int t = 0; t < 4; ++t) {
      tmp[(2 * i + t) % len] += kH[t] * a + kG[t] * d;
    }
  }
  for (int i = 0; i < len; ++i) x[i * static_cast<std::ptrdiff_t>(stride)] = tmp[i];
}

int padded_size(int n, int levels) {
  const int mult = 1 << levels;
  return ((n + mult - 1) / mult) * mult;
}

}  // namespace

WaveletCoeffs wavelet_forward(const ComplexImage& x, int levels) {
  if (!x.square()) throw std::invalid_argument("wavelet_forward: image must be square");
  if (levels < 1) throw std::invalid_argument("wavelet_forward: levels must be >= 1");

  WaveletCoeffs coeffs;
  coeffs.orig_n = x.width;
  coeffs.levels = levels;
  int p = padded_size(x.width, levels);
  while ((p >> levels) < 2) p *= 2;  // keep the coarsest band at least 2 wide
  coeffs.padded_n = p;
  coeffs.data.assign(static_cast<std::size_t>(p) * p, Complex(0.0, 0.0));
  for (int iy = 0; iy < x.height; ++iy) {
    for (int ix = 0; ix < x.width; ++ix) coeffs.data[static_cast<std::size_t>(iy) * p + ix] = x.at(ix, iy);
  }

  std::vector<Complex> tmp;
  int len = p;
  for (int level = 0; level < levels; ++level) {
    for (int iy = 0; iy < len; ++iy) analyze_1d(coeffs.data.data() + static_cast<std::size_t>(iy) * p, 1, len, tmp);
    for (int ix = 0; ix < len; ++ix) analyze_1d(coeffs.data.data() + ix, p, len, tmp);
    len /= 2;
  }
  return coeffs;
}

ComplexImage wavelet_adjoint(const WaveletCoeffs& coeffs) {
  const int p = coeffs.padded_n;
  std::vector<Complex> work = coeffs.data;
  std::vector<Complex> tmp;
  int len = p >> coeffs.levels;
  for (int level = 0; level < coeffs.levels; ++level) {
    len *= 2;
    for (int ix = 0; ix < len; ++ix) synthesize_1d(work.data() + ix, p, len, tmp);
    for (int iy = 0; iy < len; ++iy) synthesize_1d(work.data() + static_cast<std::size_t>(iy) * p, 1, len, tmp);
  }

  ComplexImage out(coeffs.orig_n, coeffs.orig_n);
  for (int iy = 0; iy < coeffs.orig_n; ++iy) {
    for (int ix = 0; ix < coeffs.orig_n; ++ix) out.at(ix, iy) = work[static_cast<std::size_t>(iy) * p + ix];
  }
  return out;
}

double soft_threshold(double value, double threshold) {
  const double mag = std::abs(value) - threshold;
  if (mag <= 0.0) return 0.0;
  return value >= 0.0 ? mag : -mag;
}

Complex soft_threshold(Complex value, double threshold) {
  const double mag = std::abs(value);
  if (mag <= threshold) return Complex(0.0, 0.0);
  return value * ((mag - threshold) / mag);
}

namespace {

// Soft-threshold every detail coefficient, leaving the coarsest approximation
// band untouched.
void threshold_details(WaveletCoeffs& coeffs, double threshold) {
  const int p = coeffs.padded_n;
  const int approx = p >> coeffs.levels;
  for (int iy = 0; iy < p; ++iy) {
    for (int ix = 0; ix < p; ++ix) {
      if (ix < approx && iy < approx) continue;
      auto& z = coeffs.data[static_cast<std::size_t>(iy) * p + ix];
      z = soft_threshold(z, threshold);
    }
  }
}

double detail_l1(const WaveletCoeffs& coeffs) {
  const int p = coeffs.padded_n;
  const int approx = p >> coeffs.levels;
  double s = 0.0;
  for (int iy = 0; iy < p; ++iy) {
    for (int ix = 0; ix < p; ++ix) {
      if (ix < approx && iy < approx) continue;
      s += std::abs(coeffs.data[static_cast<std::size_t>(iy) * p + ix]);
    }
  }
  return s;
}

double max_detail(const WaveletCoeffs& coeffs) {
  const int p = coeffs.padded_n;
  const int approx = p >> coeffs.levels;
  double m = 0.0;
  for (int iy = 0; iy < p; ++iy) {
    for (int ix = 0; ix < p; ++ix) {
      if (ix < approx && iy < approx) continue;
      m = std::max(m, std::abs(coeffs.data[static_cast<std::size_t>(iy) * p + ix]));
    }
  }
  return m;
}

}  // namespace

ComplexImage l1_wavelet_reconstruct(const acquisition::KSpaceData& y, const phantom::CoilMaps& maps,
                                    const phantom::SampledTrajectory& traj, const L1WaveletConfig& cfg) {
  if (cfg.lambda < 0.0 || cfg.max_iters < 1) throw std::invalid_argument("l1_wavelet_reconstruct: invalid config");

  acquisition::MotionForwardOperator op(maps, traj);
  if (y.samples.size() != op.total_samples()) throw std::invalid_argument("l1_wavelet_reconstruct: sample count mismatch");

  const int n = traj.grid_n;
  const double inv_n = 1.0 / n;
  const motion::MotionTrajectory zero_motion = motion::MotionTrajectory::zeros(traj.num_trs());

  std::vector<Complex> scratch(y.samples.size());
  auto normal_apply = [&](const ComplexImage& v) {
    // (A0/N)^H (A0/N) v
    op.set_image(v);
    op.forward(zero_motion, scratch);
    ComplexImage out = op.adjoint(scratch, zero_motion);
    for (auto& z : out.data) z *= inv_n * inv_n;
    return out;
  };

  // Lipschitz constant of the normalized normal operator by power iteration.
  ComplexImage v(n, n);
  {
    Rng rng(0x9e3779b97f4a7c15ull);
    for (auto& z : v.data) z = rng.complex_gaussian(1.0);
  }
  double lip = 1.0;
  for (int it = 0; it < 30; ++it) {
    const double nv = l2_norm(v);
    if (!(nv > 0.0) || !std::isfinite(nv)) throw std::runtime_error("l1_wavelet_reconstruct: power iteration failed");
    for (auto& z : v.data) z /= nv;
    v = normal_apply(v);
    lip = l2_norm(v);
  }
  if (!std::isfinite(lip) || lip <= 0.0) throw std::runtime_error("l1_wavelet_reconstruct: power iteration failed");
  double step = 1.0 / (1.02 * lip);

  // Zero-filled adjoint reconstruction anchors the relative lambda.
  ComplexImage x(n, n);
  {
    ComplexImage zf = op.adjoint(y.samples, zero_motion);
    for (auto& z : zf.data) z *= inv_n * inv_n;
    x = zf;
  }
  const double lambda_abs = cfg.lambda > 0.0 ? cfg.lambda * max_detail(wavelet_forward(x, cfg.decomposition_levels)) : 0.0;

  auto objective = [&](const ComplexImage& img) {
    op.set_image(img);
    op.forward(zero_motion, scratch);
    double f = 0.0;
    for (std::size_t j = 0; j < scratch.size(); ++j) f += std::norm(y.samples[j] - scratch[j]);
    f *= 0.5 * inv_n * inv_n;
    if (lambda_abs > 0.0) f += lambda_abs * detail_l1(wavelet_forward(img, cfg.decomposition_levels));
    return f;
  };

  ComplexImage z = x;
  double fx = objective(x);
  double t = 1.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    // gradient at the extrapolated point; data term value falls out for free
    op.set_image(z);
    op.forward(zero_motion, scratch);
    double fz_data = 0.0;
    for (std::size_t j = 0; j < scratch.size(); ++j) {
      scratch[j] -= y.samples[j];
      fz_data += std::norm(scratch[j]);
    }
    fz_data *= 0.5 * inv_n * inv_n;
    ComplexImage grad = op.adjoint(scratch, zero_motion);
    for (auto& g : grad.data) g *= inv_n * inv_n;

    // proximal step with backtracking: shrink until the data term sits below
    // its quadratic model at z, which restores the descent guarantee even if
    // the power iteration underestimated the Lipschitz constant
    ComplexImage u;
    double fu_data = 0.0;
    for (;;) {
      u = z;
      for (std::size_t i = 0; i < u.size(); ++i) u.data[i] -= step * grad.data[i];
      if (lambda_abs > 0.0) {
        WaveletCoeffs w = wavelet_forward(u, cfg.decomposition_levels);
        threshold_details(w, lambda_abs * step);
        u = wavelet_adjoint(w);
      }
      op.set_image(u);
      op.forward(zero_motion, scratch);
      fu_data = 0.0;
      for (std::size_t j = 0; j < scratch.size(); ++j) fu_data += std::norm(y.samples[j] - scratch[j]);
      fu_data *= 0.5 * inv_n * inv_n;

      double inner = 0.0;
      double dist2 = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const Complex d = u.data[i] - z.data[i];
        inner += grad.data[i].real() * d.real() + grad.data[i].imag() * d.imag();
        dist2 += std::norm(d);
      }
      if (fu_data <= fz_data + inner + 0.5 * dist2 / step + 1e-12 || step < 1e-8) break;
      step *= 0.5;
    }

    const double fu = fu_data + (lambda_abs > 0.0 ? lambda_abs * detail_l1(wavelet_forward(u, cfg.decomposition_levels)) : 0.0);
    ComplexImage x_next = fu <= fx ? u : x;  // monotone selection
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));

    double delta = 0.0;
    double base = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      delta += std::norm(x_next.data[i] - x.data[i]);
      base += std::norm(x.data[i]);
    }

    ComplexImage z_next(n, n);
    for (std::size_t i = 0; i < z_next.size(); ++i) {
      z_next.data[i] = x_next.data[i] + (t / t_next) * (u.data[i] - x_next.data[i]) +
                       ((t - 1.0) / t_next) * (x_next.data[i] - x.data[i]);
    }

    const bool restart = fu > fx;  // adaptive restart on objective increase
    x = std::move(x_next);
    fx = std::min(fu, fx);
    if (restart) {
      t = 1.0;
      z = x;
    } else {
      t = t_next;
      z = std::move(z_next);
    }

    // only an accepted step counts as convergence; a rejected candidate just
    // restarts the momentum
    if (!restart && base > 0.0 && std::sqrt(delta / base) < cfg.tol) break;
  }
  return x;
}

}  // namespace mrmoco::baseline
