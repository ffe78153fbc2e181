#include "mrmoco/sampler.hpp"

#include <cmath>

#include "mrmoco/metrics.hpp"
#include "mrmoco/rng.hpp"

namespace mrmoco::sampler {

double effective_sigma(double level_sigma, double measurement_sigma) {
  if (level_sigma < 0.0 || measurement_sigma < 0.0) throw std::invalid_argument("effective_sigma: negative sigma");
  if (level_sigma == 0.0 && measurement_sigma == 0.0) throw std::invalid_argument("effective_sigma: both sigmas zero");
  return std::hypot(level_sigma, measurement_sigma);
}

namespace {

double tr_residual_norm2(std::span<const Complex> y, const acquisition::MotionForwardOperator& op,
                         const motion::MotionState& state, int tr, std::vector<Complex>& scratch) {
  const std::size_t len = op.tr_length(tr);
  const std::size_t m = op.samples_per_coil();
  const std::size_t begin = op.trajectory().tr_bounds[tr].begin;
  scratch.resize(len * op.num_coils());
  op.forward_tr(state, tr, scratch);
  double s = 0.0;
  for (int c = 0; c < op.num_coils(); ++c) {
    const Complex* yblock = y.data() + static_cast<std::size_t>(c) * m + begin;
    const Complex* fblock = scratch.data() + static_cast<std::size_t>(c) * len;
    for (std::size_t j = 0; j < len; ++j) s += std::norm(yblock[j] - fblock[j]);
  }
  return s;
}

// Exact translation gradient of the TR's residual via the phase-ramp
// derivative d/dphi exp(-i k.phi) = -i k exp(-i k.phi).
void analytic_translation_grad(std::span<const Complex> y, const acquisition::MotionForwardOperator& op,
                               const motion::MotionState& state, int tr, std::vector<Complex>& scratch,
                               double& g_phix, double& g_phiy) {
  const std::size_t len = op.tr_length(tr);
  const std::size_t m = op.samples_per_coil();
  const std::size_t begin = op.trajectory().tr_bounds[tr].begin;
  scratch.resize(len * op.num_coils());
  op.forward_tr(state, tr, scratch);

  const double th = deg_to_rad(state.theta_deg);
  const double ct = std::cos(th);
  const double st = std::sin(th);
  const auto& coords = op.trajectory().coords;

  g_phix = 0.0;
  g_phiy = 0.0;
  for (int c = 0; c < op.num_coils(); ++c) {
    const Complex* yblock = y.data() + static_cast<std::size_t>(c) * m + begin;
    const Complex* fblock = scratch.data() + static_cast<std::size_t>(c) * len;
    for (std::size_t j = 0; j < len; ++j) {
      const KPoint& k = coords[begin + j];
      const double kx = ct * k.kx - st * k.ky;
      const double ky = st * k.kx + ct * k.ky;
      const Complex r = yblock[j] - fblock[j];
      const double im = std::imag(std::conj(r) * fblock[j]);
      g_phix += -2.0 * kx * im;
      g_phiy += -2.0 * ky * im;
    }
  }
}

std::vector<double> kappa_gradient_with_op(std::span<const Complex> y, const acquisition::MotionForwardOperator& op,
                                           const motion::MotionTrajectory& mot, KappaGradMode mode,
                                           double fd_step_theta, double fd_step_phi) {
  const int num_trs = op.num_trs();
  if (mot.num_trs() != num_trs) throw std::invalid_argument("kappa_gradient: motion length mismatch");

  std::vector<double> grad(3 * static_cast<std::size_t>(num_trs), 0.0);
  std::vector<Complex> scratch;
  for (int tr = 0; tr < num_trs; ++tr) {
    const motion::MotionState base = mot.states[tr];

    auto central = [&](double motion::MotionState::* field, double h) {
      motion::MotionState plus = base;
      motion::MotionState minus = base;
      plus.*field += h;
      minus.*field -= h;
      const double fp = tr_residual_norm2(y, op, plus, tr, scratch);
      const double fm = tr_residual_norm2(y, op, minus, tr, scratch);
      return (fp - fm) / (2.0 * h);
    };

    grad[3 * tr + 0] = central(&motion::MotionState::theta_deg, fd_step_theta);
    if (mode == KappaGradMode::kFiniteDifference) {
      grad[3 * tr + 1] = central(&motion::MotionState::phi_x, fd_step_phi);
      grad[3 * tr + 2] = central(&motion::MotionState::phi_y, fd_step_phi);
    } else {
      analytic_translation_grad(y, op, base, tr, scratch, grad[3 * tr + 1], grad[3 * tr + 2]);
    }
  }
  return grad;
}

}  // namespace

std::vector<double> kappa_gradient(const acquisition::KSpaceData& y, const ComplexImage& x,
                                   const phantom::CoilMaps& maps, const phantom::SampledTrajectory& traj,
                                   const motion::MotionTrajectory& mot, KappaGradMode mode, double fd_step_theta,
                                   double fd_step_phi) {
  if (fd_step_theta <= 0.0 || fd_step_phi <= 0.0) throw std::invalid_argument("kappa_gradient: finite-difference steps must be positive");
  acquisition::MotionForwardOperator op(maps, traj);
  op.set_image(x);
  if (y.samples.size() != op.total_samples()) throw std::invalid_argument("kappa_gradient: sample count mismatch");
  return kappa_gradient_with_op(y.samples, op, mot, mode, fd_step_theta, fd_step_phi);
}

JointResult joint_langevin(const acquisition::KSpaceData& y, const phantom::CoilMaps& maps,
                           const phantom::SampledTrajectory& traj, const prior::ScoreProvider& prior_x,
                           const motion::MotionPrior& prior_k, const JointSampleConfig& cfg) {
  const int n = traj.grid_n;
  if (n < 2) throw std::invalid_argument("joint_langevin: invalid trajectory grid");
  if (cfg.schedule.num_levels() < 1 || cfg.schedule.steps_per_level < 1) throw std::invalid_argument("joint_langevin: empty schedule");
  if (cfg.motion_step_scale < 0.0) throw std::invalid_argument("joint_langevin: motion_step_scale must be >= 0");
  if (y.noise_std < 0.0) throw std::invalid_argument("joint_langevin: negative noise_std");
  if (cfg.fixed_image && (!cfg.fixed_image->square() || cfg.fixed_image->width != n)) {
    throw std::invalid_argument("joint_langevin: fixed image grid mismatch");
  }

  const bool have_data = y.num_coils > 0;
  if (have_data && y.samples.size() != traj.coords.size() * static_cast<std::size_t>(y.num_coils)) {
    throw std::invalid_argument("joint_langevin: sample count mismatch");
  }

  const int num_trs = traj.num_trs();
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  const double sigma_meas_norm = y.noise_std / n;

  Rng rng(cfg.seed);
  const bool update_image = !cfg.fixed_image.has_value();

  ComplexImage x;
  if (update_image) {
    x = ComplexImage(n, n);
    const double s0 = cfg.schedule.levels.front();
    for (auto& z : x.data) z = rng.complex_gaussian(s0);
  } else {
    x = *cfg.fixed_image;
  }

  motion::MotionTrajectory kappa = motion::MotionTrajectory::zeros(num_trs);

  std::optional<acquisition::MotionForwardOperator> op;
  if (have_data) {
    op.emplace(maps, traj);
    op->set_image(x);
  }

  std::vector<Complex> fwd(have_data ? y.samples.size() : 0);
  std::vector<Complex> resid(fwd.size());

  // The kappa steps are preconditioned by the forward model's sensitivity so
  // that step size times fidelity curvature stays O(1) for every parameter,
  // regardless of data magnitude, grid size, coil count, or acceleration:
  // per-TR data energy times the mean squared phase change per unit of each
  // parameter (|k|^2 <r^2> for rotation in degrees, kx^2/ky^2 for
  // translations in pixels).
  double tr_energy = 0.0;
  double kappa_precond[3] = {1.0, 1.0, 1.0};
  if (have_data && num_trs > 0) {
    for (const auto& v : y.samples) tr_energy += std::norm(v);
    tr_energy = tr_energy * inv_n2 / num_trs;

    double k2 = 0.0, kx2 = 0.0, ky2 = 0.0;
    for (const auto& p : traj.coords) {
      k2 += p.kx * p.kx + p.ky * p.ky;
      kx2 += p.kx * p.kx;
      ky2 += p.ky * p.ky;
    }
    const double m = static_cast<double>(traj.coords.size());
    const double r2 = static_cast<double>(n) * n / 6.0;  // mean squared pixel offset
    const double deg = kPi / 180.0;
    kappa_precond[0] = std::max(k2 / m * r2 * deg * deg, 1e-12);
    kappa_precond[1] = std::max(kx2 / m, 1e-12);
    kappa_precond[2] = std::max(ky2 / m, 1e-12);
  }

  auto fidelity_and_residual = [&]() {
    if (!have_data) return 0.0;
    op->forward(kappa, fwd);
    double f = 0.0;
    for (std::size_t j = 0; j < fwd.size(); ++j) {
      resid[j] = y.samples[j] - fwd[j];
      f += std::norm(resid[j]);
    }
    return f * inv_n2;
  };

  JointTrace trace;
  auto record = [&](int iteration, int level, double fidelity) {
    TraceRecord rec;
    rec.iteration = iteration;
    rec.level = level;
    rec.fidelity = fidelity;
    if (cfg.reference) rec.nrmse = metrics::nrmse(x, *cfg.reference, true);
    rec.kappa = kappa;
    trace.records.push_back(std::move(rec));
  };

  const double init_fidelity = fidelity_and_residual();
  const double divergence_limit = 1e6 * (init_fidelity + 1e-12);
  record(0, 0, init_fidelity);

  // Deterministic per-TR basin probe, run at noise-level boundaries: the
  // quenched fidelity landscape has ripple minima about one pixel apart, and
  // a trapped TR cannot cross them by Langevin noise alone. Each TR tests a
  // small stencil of single-coordinate offsets against its own residual block
  // and jumps only on strict improvement, so TR locality is preserved and the
  // subsequent inner steps refine within the new basin.
  auto probe_kappa = [&]() {
    static constexpr double kOffsets[] = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    std::vector<Complex> scratch;
    for (int tr = 0; tr < num_trs; ++tr) {
      motion::MotionState best = kappa.states[tr];
      double best_f = tr_residual_norm2(y.samples, *op, best, tr, scratch);
      const motion::MotionState center = best;
      for (auto field : {&motion::MotionState::theta_deg, &motion::MotionState::phi_x, &motion::MotionState::phi_y}) {
        for (const double off : kOffsets) {
          motion::MotionState cand = center;
          cand.*field += off;
          const double f = tr_residual_norm2(y.samples, *op, cand, tr, scratch);
          if (f < best_f - 1e-12) {
            best_f = f;
            best = cand;
          }
        }
      }
      kappa.states[tr] = best;
    }
  };

  const int total_steps = cfg.schedule.num_levels() * cfg.schedule.steps_per_level;
  int iteration = 0;
  for (int level = 0; level < cfg.schedule.num_levels(); ++level) {
    const double eta = cfg.schedule.step_size(level);
    const double lambda_base = tr_energy > 0.0 ? cfg.motion_step_scale * eta / tr_energy : 0.0;
    if (level > 0 && have_data && lambda_base > 0.0 && num_trs > 0) probe_kappa();
    const double sigma_eff = effective_sigma(cfg.schedule.levels[level], sigma_meas_norm);
    const double inv_s2 = 1.0 / (sigma_eff * sigma_eff);

    for (int step = 0; step < cfg.schedule.steps_per_level; ++step) {
      const double fidelity = fidelity_and_residual();
      if (have_data && fidelity > divergence_limit) {
        record(iteration, level, fidelity);
        throw DivergenceError("joint_langevin: data fidelity diverged", std::move(trace));
      }

      if (update_image) {
        ComplexImage drift = prior_x.score(x, level);
        if (have_data) {
          const ComplexImage grad_data = op->adjoint(resid, kappa);
          const double w = inv_n2 * inv_s2;
          for (std::size_t i = 0; i < x.size(); ++i) drift.data[i] += grad_data.data[i] * w;
        }
        const double noise_std = std::sqrt(2.0 * eta);
        for (std::size_t i = 0; i < x.size(); ++i) {
          x.data[i] += eta * drift.data[i] + rng.complex_gaussian(noise_std);
        }
        if (have_data) op->set_image(x);
      }

      if (have_data && lambda_base > 0.0 && num_trs > 0) {
        const auto g_data = kappa_gradient_with_op(y.samples, *op, kappa, cfg.kappa_grad_mode, cfg.fd_step_theta,
                                                   cfg.fd_step_phi);
        const auto g_prior = motion::prior_log_grad(kappa, prior_k);
        const double w = inv_n2 * inv_s2;
        for (int tr = 0; tr < num_trs; ++tr) {
          auto step_param = [&](double& value, int p, int kind) {
            const double lambda = lambda_base / kappa_precond[kind];
            value += lambda * (-g_data[p] * w + g_prior.grad[p]) + std::sqrt(2.0 * lambda) * rng.gaussian();
          };
          step_param(kappa.states[tr].theta_deg, 3 * tr + 0, 0);
          step_param(kappa.states[tr].phi_x, 3 * tr + 1, 1);
          step_param(kappa.states[tr].phi_y, 3 * tr + 2, 2);
        }
      }

      ++iteration;
      if (iteration % cfg.record_every == 0 && iteration != total_steps) {
        record(iteration, level, fidelity_and_residual());
      }
    }
  }

  record(total_steps, cfg.schedule.num_levels() - 1, fidelity_and_residual());

  JointResult result;
  result.image = std::move(x);
  result.kappa = std::move(kappa);
  result.trace = std::move(trace);
  return result;
}

}  // namespace mrmoco::sampler
