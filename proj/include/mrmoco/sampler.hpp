#ifndef MRMOCO_SAMPLER_HPP
#define MRMOCO_SAMPLER_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrmoco/acquisition.hpp"
#include "mrmoco/motion.hpp"
#include "mrmoco/phantom.hpp"
#include "mrmoco/prior.hpp"
#include "mrmoco/types.hpp"

namespace mrmoco::sampler {

enum class KappaGradMode {
  kFiniteDifference,  // central differences for all three parameters
  kAnalyticPhase,     // exact translation gradients, finite differences for rotation
};

struct JointSampleConfig {
  prior::NoiseSchedule schedule;
  double motion_step_scale = 0.5;  // lambda_i = motion_step_scale * eta_i
  KappaGradMode kappa_grad_mode = KappaGradMode::kFiniteDifference;
  double fd_step_theta = 0.01;  // degrees
  double fd_step_phi = 0.01;    // pixels
  std::uint64_t seed = 0;
  int record_every = 10;

  // When set, the image is held at this value and only kappa is sampled.
  std::optional<ComplexImage> fixed_image;
  // When set, trace records carry magnitude NRMSE against this reference.
  std::optional<ComplexImage> reference;
};

struct TraceRecord {
  int iteration = 0;
  int level = 0;
  double fidelity = 0.0;  // ||y - A_k x||^2 / N^2 (normalized operator units)
  std::optional<double> nrmse;
  motion::MotionTrajectory kappa;
};

struct JointTrace {
  std::vector<TraceRecord> records;
};

struct JointResult {
  ComplexImage image;
  motion::MotionTrajectory kappa;
  JointTrace trace;
};

// Raised when the data fidelity explodes past 1e6x its initial value; carries
// the trace gathered so far for diagnosis.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, JointTrace trace) : std::runtime_error(what), trace(std::move(trace)) {}
  JointTrace trace;
};

// sigma_eff^2 = level^2 + measurement^2: the annealed likelihood weighting.
double effective_sigma(double level_sigma, double measurement_sigma);

// Gradient of the raw data fidelity ||y - A_k x||^2 with respect to the
// motion parameters, [theta, phi_x, phi_y] per TR. Each TR's components
// depend only on that TR's samples.
std::vector<double> kappa_gradient(const acquisition::KSpaceData& y, const ComplexImage& x,
                                   const phantom::CoilMaps& maps, const phantom::SampledTrajectory& traj,
                                   const motion::MotionTrajectory& mot, KappaGradMode mode, double fd_step_theta,
                                   double fd_step_phi);

// Joint annealed Langevin sampling over (x, kappa). For each level i and each
// of schedule.steps_per_level inner steps:
//   x     <- x + eta_i * (A^H(y - A x)/sigma_eff^2 + score(x, i)) + N(0, 2 eta_i)
//   kappa <- kappa + lambda_i * (-grad ||y - A x||^2 / sigma_eff^2
//                                + grad log q(kappa)) + N(0, 2 lambda_i)
// with lambda_i = motion_step_scale * eta_i and noise per real component.
// Internally the forward operator is normalized by 1/N (unit spectral scale)
// so the default step sizes are grid-size independent; sigma_eff combines the
// annealing level with the measurement noise in the same normalized units.
// An empty measurement set (num_coils == 0) runs prior-only dynamics.
JointResult joint_langevin(const acquisition::KSpaceData& y, const phantom::CoilMaps& maps,
                           const phantom::SampledTrajectory& traj, const prior::ScoreProvider& prior_x,
                           const motion::MotionPrior& prior_k, const JointSampleConfig& cfg);

}  // namespace mrmoco::sampler

#endif
