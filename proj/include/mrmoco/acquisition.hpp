#ifndef MRMOCO_ACQUISITION_HPP
#define MRMOCO_ACQUISITION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mrmoco/gridmath.hpp"
#include "mrmoco/motion.hpp"
#include "mrmoco/phantom.hpp"
#include "mrmoco/types.hpp"

namespace mrmoco::acquisition {

// Measured multi-coil k-space. Samples are coil-major: coil c occupies
// [c*M, (c+1)*M) in the coordinate order of the SampledTrajectory.
struct KSpaceData {
  std::vector<Complex> samples;
  int num_coils = 0;
  double noise_std = 0.0;

  std::size_t samples_per_coil() const { return num_coils > 0 ? samples.size() / num_coils : 0; }
};

// Rotates every coordinate of TR t by that TR's angle, counter-clockwise
// positive (image-space rotation by +theta rotates k-space by +theta).
KCoords rotate_coords(const phantom::SampledTrajectory& traj, const motion::MotionTrajectory& mot);

// Per-sample linear phase factors exp(-i (kx*phi_x + ky*phi_y)) for the
// translation of the owning TR. `rotated` must be the rotate_coords output:
// the phase is applied after rotation, on the rotated coordinates.
std::vector<Complex> translation_phase(const phantom::SampledTrajectory& traj, const motion::MotionTrajectory& mot,
                                       const KCoords& rotated);

// The motion-parameterized forward model: per coil, NUFFT of the coil-weighted
// image at rotated coordinates followed by the translation phase. Noise-free;
// the returned noise_std is 0.
KSpaceData apply_forward(const ComplexImage& x, const phantom::CoilMaps& maps, const phantom::SampledTrajectory& traj,
                         const motion::MotionTrajectory& mot);

// Exact adjoint of apply_forward: conjugate phase, NUFFT adjoint, conjugate
// coil weighting, summed over coils.
ComplexImage apply_adjoint(const KSpaceData& y, const phantom::CoilMaps& maps, const phantom::SampledTrajectory& traj,
                           const motion::MotionTrajectory& mot);

// Adds i.i.d. complex Gaussian noise with E|w|^2 = sigma^2 (sigma/sqrt(2) per
// real component) and records sigma in noise_std. Deterministic per seed.
KSpaceData add_noise(const KSpaceData& y, double sigma, std::uint64_t seed);

// Stateful form of the forward model for iterative solvers. The oversampled
// coil spectra depend only on the image, so once set_image has run, sampling
// at any motion state (whole trajectory or a single TR) costs only the
// gridding interpolation. Not thread-safe across set_image calls.
class MotionForwardOperator {
 public:
  MotionForwardOperator(const phantom::CoilMaps& maps, const phantom::SampledTrajectory& traj);

  int grid_size() const { return traj_.grid_n; }
  int num_coils() const { return maps_.num_coils; }
  int num_trs() const { return traj_.num_trs(); }
  std::size_t samples_per_coil() const { return traj_.coords.size(); }
  std::size_t total_samples() const { return traj_.coords.size() * maps_.num_coils; }
  const phantom::SampledTrajectory& trajectory() const { return traj_; }

  void set_image(const ComplexImage& x);

  // Full forward at the given motion; out must have total_samples() entries.
  void forward(const motion::MotionTrajectory& mot, std::span<Complex> out) const;

  // Forward restricted to one TR under a candidate state for that TR.
  // out must have num_coils * tr_length(tr) entries, coil-major.
  std::size_t tr_length(int tr) const;
  void forward_tr(const motion::MotionState& state, int tr, std::span<Complex> out) const;

  // Adjoint applied to a full coil-major sample vector.
  ComplexImage adjoint(std::span<const Complex> samples, const motion::MotionTrajectory& mot) const;

 private:
  void rotated_tr_coords(const motion::MotionState& state, int tr, KCoords& out) const;

  phantom::CoilMaps maps_;
  phantom::SampledTrajectory traj_;
  gridmath::Nufft nufft_;
  std::vector<gridmath::Nufft::Spectrum> coil_spectra_;
  bool image_set_ = false;
};

}  // namespace mrmoco::acquisition

#endif
