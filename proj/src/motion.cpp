#include "mrmoco/motion.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mrmoco/rng.hpp"

namespace mrmoco::motion {

MotionTrajectory simulate_motion(int num_trs, double amplitude, std::uint64_t seed) {
  if (num_trs < 1) throw std::invalid_argument("simulate_motion: num_trs must be >= 1");
  if (amplitude < 0.0) throw std::invalid_argument("simulate_motion: amplitude must be >= 0");

  Rng rng(seed);
  MotionTrajectory traj;
  traj.states.resize(num_trs);
  for (auto& s : traj.states) {
    s.theta_deg = rng.uniform(-amplitude, amplitude);
    s.phi_x = rng.uniform(-amplitude, amplitude);
    s.phi_y = rng.uniform(-amplitude, amplitude);
  }
  return traj;
}

PriorGradient prior_log_grad(const MotionTrajectory& traj, const MotionPrior& prior) {
  if (prior.bound <= 0.0) throw std::invalid_argument("prior_log_grad: bound must be positive");

  PriorGradient out;
  out.grad.reserve(3 * traj.states.size());
  out.flagged.reserve(3 * traj.states.size());
  auto push = [&](double v) {
    if (std::abs(v) >= prior.bound) {
      out.grad.push_back(-(std::abs(v) - prior.bound) * (v >= 0.0 ? 1.0 : -1.0));
      out.flagged.push_back(true);
    } else {
      out.grad.push_back(0.0);
      out.flagged.push_back(false);
    }
  };
  for (const auto& s : traj.states) {
    push(s.theta_deg);
    push(s.phi_x);
    push(s.phi_y);
  }
  return out;
}

OffsetRemovedError global_offset_removed_error(const MotionTrajectory& est, const MotionTrajectory& truth) {
  if (est.states.size() != truth.states.size()) throw std::invalid_argument("global_offset_removed_error: trajectory length mismatch");
  if (est.states.empty()) return {};

  const auto n = static_cast<double>(est.states.size());
  double dth = 0.0, dpx = 0.0, dpy = 0.0;
  for (std::size_t i = 0; i < est.states.size(); ++i) {
    dth += est.states[i].theta_deg - truth.states[i].theta_deg;
    dpx += est.states[i].phi_x - truth.states[i].phi_x;
    dpy += est.states[i].phi_y - truth.states[i].phi_y;
  }
  dth /= n;
  dpx /= n;
  dpy /= n;

  OffsetRemovedError err;
  for (std::size_t i = 0; i < est.states.size(); ++i) {
    err.theta_deg += std::abs(est.states[i].theta_deg - truth.states[i].theta_deg - dth);
    err.phi_x += std::abs(est.states[i].phi_x - truth.states[i].phi_x - dpx);
    err.phi_y += std::abs(est.states[i].phi_y - truth.states[i].phi_y - dpy);
  }
  err.theta_deg /= n;
  err.phi_x /= n;
  err.phi_y /= n;
  return err;
}

std::string to_table(const MotionTrajectory& traj) {
  std::string out = "# tr theta_deg phi_x_px phi_y_px\n";
  char buf[128];
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g %.17g\n", i, s.theta_deg, s.phi_x, s.phi_y);
    out += buf;
  }
  return out;
}

MotionTrajectory from_table(const std::string& text) {
  MotionTrajectory traj;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::size_t idx;
    MotionState s;
    if (!(row >> idx >> s.theta_deg >> s.phi_x >> s.phi_y)) throw std::runtime_error("motion table: malformed row: " + line);
    if (idx != traj.states.size()) throw std::runtime_error("motion table: rows out of order");
    traj.states.push_back(s);
  }
  return traj;
}

}  // namespace mrmoco::motion
