#ifndef MRMOCO_METRICS_HPP
#define MRMOCO_METRICS_HPP

#include "mrmoco/gridmath.hpp"
#include "mrmoco/motion.hpp"
#include "mrmoco/types.hpp"

namespace mrmoco::metrics {

struct EvalReport {
  double nrmse_raw = 0.0;
  double nrmse_aligned = 0.0;
  motion::MotionState alignment;
  bool magnitude_only = true;
};

// ||est - ref|| / ||ref||, over magnitudes by default (phantom phase is
// synthetic; MRI evaluation convention is magnitude).
double nrmse(const ComplexImage& estimate, const ComplexImage& reference, bool magnitude_only = true);

// Applies a global rigid state to an image with the acquisition module's
// conventions: sample the spectrum at rotated grid coordinates, apply the
// translation phase, invert on the Cartesian grid. The all-zero state is an
// exact passthrough. Reuses one spectrum across many states.
class RigidResampler {
 public:
  explicit RigidResampler(const ComplexImage& image);
  ComplexImage resample(const motion::MotionState& state) const;

  // Split form for sweeps over translations at a fixed rotation.
  struct Rotated {
    KCoords coords;
    std::vector<Complex> samples;
  };
  Rotated sample_rotated(double theta_deg) const;
  ComplexImage shift_and_invert(const Rotated& rot, double phi_x, double phi_y) const;

 private:
  int n_;
  gridmath::Nufft nufft_;
  gridmath::Nufft::Spectrum spectrum_;
  ComplexImage original_;
  KCoords grid_coords_;
};

ComplexImage rigid_resample(const ComplexImage& image, const motion::MotionState& state);

struct AlignResult {
  ComplexImage aligned;
  motion::MotionState transform;
};

// Finds the global rigid transform minimizing magnitude NRMSE: coarse grid
// search (theta +-5 deg step 0.5, phi +-3 px step 0.25) then three rounds of
// coordinate descent with step halving down to 0.01. Ties break toward the
// lowest theta, then phi_x, then phi_y.
AlignResult align_to_reference(const ComplexImage& estimate, const ComplexImage& reference);

// Raw + aligned NRMSE in one report.
EvalReport evaluate(const ComplexImage& estimate, const ComplexImage& reference);

}  // namespace mrmoco::metrics

#endif
