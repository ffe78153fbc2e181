#include "mrmoco/metrics.hpp"

#include <array>
#include <cmath>

namespace mrmoco::metrics {

double nrmse(const ComplexImage& estimate, const ComplexImage& reference, bool magnitude_only) {
  if (estimate.width != reference.width || estimate.height != reference.height) {
    throw std::invalid_argument("nrmse: image dimensions differ");
  }
  double num = 0.0;
  double den = 0.0;
  if (magnitude_only) {
    for (std::size_t i = 0; i < estimate.size(); ++i) {
      const double d = std::abs(estimate.data[i]) - std::abs(reference.data[i]);
      num += d * d;
      den += std::norm(reference.data[i]);
    }
  } else {
    for (std::size_t i = 0; i < estimate.size(); ++i) {
      num += std::norm(estimate.data[i] - reference.data[i]);
      den += std::norm(reference.data[i]);
    }
  }
  if (den == 0.0) throw std::invalid_argument("nrmse: reference is identically zero");
  return std::sqrt(num / den);
}

RigidResampler::RigidResampler(const ComplexImage& image)
    : n_(image.width), nufft_(image.width), spectrum_(nufft_.prepare(image)), original_(image) {
  if (!image.square()) throw std::invalid_argument("RigidResampler: image must be square");
  grid_coords_.resize(image.size());
  const double dk = 2.0 * kPi / n_;
  const int c = n_ / 2;
  for (int iy = 0; iy < n_; ++iy) {
    for (int ix = 0; ix < n_; ++ix) {
      grid_coords_[static_cast<std::size_t>(iy) * n_ + ix] = {dk * (ix - c), dk * (iy - c)};
    }
  }
}

RigidResampler::Rotated RigidResampler::sample_rotated(double theta_deg) const {
  const double th = deg_to_rad(theta_deg);
  const double ct = std::cos(th);
  const double st = std::sin(th);

  Rotated rot;
  rot.coords.resize(grid_coords_.size());
  for (std::size_t j = 0; j < grid_coords_.size(); ++j) {
    rot.coords[j].kx = ct * grid_coords_[j].kx - st * grid_coords_[j].ky;
    rot.coords[j].ky = st * grid_coords_[j].kx + ct * grid_coords_[j].ky;
  }
  rot.samples.resize(grid_coords_.size());
  nufft_.sample(spectrum_, rot.coords, rot.samples);
  return rot;
}

ComplexImage RigidResampler::shift_and_invert(const Rotated& rot, double phi_x, double phi_y) const {
  ComplexImage spec(n_, n_);
  for (std::size_t j = 0; j < rot.samples.size(); ++j) {
    const double ph = -(rot.coords[j].kx * phi_x + rot.coords[j].ky * phi_y);
    spec.data[j] = rot.samples[j] * Complex(std::cos(ph), std::sin(ph));
  }
  // The sampled spectrum lives on the centered Cartesian grid, so the exact
  // inverse is the centered inverse FFT over N^2.
  gridmath::centered_fft(spec, +1);
  const double scale = 1.0 / (static_cast<double>(n_) * n_);
  for (auto& z : spec.data) z *= scale;
  return spec;
}

ComplexImage RigidResampler::resample(const motion::MotionState& state) const {
  if (state.theta_deg == 0.0 && state.phi_x == 0.0 && state.phi_y == 0.0) return original_;
  return shift_and_invert(sample_rotated(state.theta_deg), state.phi_x, state.phi_y);
}

ComplexImage rigid_resample(const ComplexImage& image, const motion::MotionState& state) {
  return RigidResampler(image).resample(state);
}

AlignResult align_to_reference(const ComplexImage& estimate, const ComplexImage& reference) {
  if (estimate.width != reference.width || estimate.height != reference.height) {
    throw std::invalid_argument("align_to_reference: image dimensions differ");
  }

  RigidResampler resampler(estimate);

  // Seed with the exact identity so alignment can never lose to the raw error.
  motion::MotionState best;
  double best_err = nrmse(resampler.resample(best), reference, true);

  // Coarse grid: one rotation sampling per theta, phase-only inner loops.
  // Strict improvement keeps the lowest-parameter tie-break.
  for (int it = -10; it <= 10; ++it) {
    const auto rot = resampler.sample_rotated(0.5 * it);
    for (int ix = -12; ix <= 12; ++ix) {
      for (int iy = -12; iy <= 12; ++iy) {
        const motion::MotionState cand{0.5 * it, 0.25 * ix, 0.25 * iy};
        const double err = nrmse(resampler.shift_and_invert(rot, cand.phi_x, cand.phi_y), reference, true);
        if (err < best_err) {
          best_err = err;
          best = cand;
        }
      }
    }
  }

  // Three rounds of coordinate descent, halving each parameter's step down
  // to 0.01 resolution.
  constexpr double kResolution = 0.01;
  for (int round = 0; round < 3; ++round) {
    const std::array<double, 3> initial_steps = {0.25, 0.125, 0.125};
    const std::array<double motion::MotionState::*, 3> fields = {&motion::MotionState::theta_deg,
                                                                 &motion::MotionState::phi_x,
                                                                 &motion::MotionState::phi_y};
    for (int p = 0; p < 3; ++p) {
      double step = initial_steps[p];
      while (step >= kResolution) {
        bool moved = false;
        for (const double delta : {step, -step}) {
          motion::MotionState cand = best;
          cand.*fields[p] += delta;
          const double err = nrmse(resampler.resample(cand), reference, true);
          if (err < best_err) {
            best_err = err;
            best = cand;
            moved = true;
            break;
          }
        }
        if (!moved) step *= 0.5;
      }
    }
  }

  AlignResult result;
  result.transform = best;
  result.aligned = resampler.resample(best);
  return result;
}

EvalReport evaluate(const ComplexImage& estimate, const ComplexImage& reference) {
  EvalReport report;
  report.magnitude_only = true;
  report.nrmse_raw = nrmse(estimate, reference, true);
  const AlignResult aligned = align_to_reference(estimate, reference);
  report.alignment = aligned.transform;
  report.nrmse_aligned = nrmse(aligned.aligned, reference, true);
  return report;
}

}  // namespace mrmoco::metrics
