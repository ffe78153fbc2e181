#ifndef MRMOCO_MOTION_HPP
#define MRMOCO_MOTION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mrmoco/types.hpp"

namespace mrmoco::motion {

// One rigid in-plane motion state: rotation in degrees, translation in
// pixels. One state per TR; all k-space points of a TR share it.
struct MotionState {
  double theta_deg = 0.0;
  double phi_x = 0.0;
  double phi_y = 0.0;
};

struct MotionTrajectory {
  std::vector<MotionState> states;

  int num_trs() const { return static_cast<int>(states.size()); }
  static MotionTrajectory zeros(int num_trs) { return MotionTrajectory{std::vector<MotionState>(num_trs)}; }
};

// Uniform box prior over every motion parameter; degrees and pixels share
// the bound.
struct MotionPrior {
  double bound = 15.0;
};

// Draws all 3*num_trs parameters i.i.d. uniform on [-amplitude, amplitude].
// Bit-reproducible for a given seed.
MotionTrajectory simulate_motion(int num_trs, double amplitude, std::uint64_t seed);

// Gradient of log q(kappa) under the box prior: zero strictly inside the box,
// a clamped quadratic-barrier restoring gradient -(|v|-bound)*sign(v) at or
// beyond it. Layout: [theta, phi_x, phi_y] per TR. `flagged` marks parameters
// at or outside the bound.
struct PriorGradient {
  std::vector<double> grad;
  std::vector<bool> flagged;
};
PriorGradient prior_log_grad(const MotionTrajectory& traj, const MotionPrior& prior);

// Mean absolute error per parameter type after removing the per-type mean
// difference (the global offset a data-consistent reconstruction may absorb).
struct OffsetRemovedError {
  double theta_deg = 0.0;
  double phi_x = 0.0;
  double phi_y = 0.0;
};
OffsetRemovedError global_offset_removed_error(const MotionTrajectory& est, const MotionTrajectory& truth);

// Plain-text table (one row per TR: index, theta, phi_x, phi_y), used for
// ground-truth dumps and estimate exports. Values round-trip exactly.
std::string to_table(const MotionTrajectory& traj);
MotionTrajectory from_table(const std::string& text);

}  // namespace mrmoco::motion

#endif
