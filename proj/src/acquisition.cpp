#include "mrmoco/acquisition.hpp"

#include <cmath>

#include "mrmoco/rng.hpp"

namespace mrmoco::acquisition {

namespace {

void check_pair(const phantom::SampledTrajectory& traj, const motion::MotionTrajectory& mot) {
  if (mot.num_trs() != traj.num_trs()) throw std::invalid_argument("motion trajectory length does not match TR count");
}

void check_maps(const phantom::CoilMaps& maps, int grid_n) {
  if (maps.num_coils < 1 || maps.maps.size() != static_cast<std::size_t>(maps.num_coils)) {
    throw std::invalid_argument("coil maps inconsistent");
  }
  for (const auto& m : maps.maps) {
    if (!m.square() || m.width != grid_n) throw std::invalid_argument("coil map grid does not match trajectory grid");
  }
}

inline void rotate_into(const KPoint& p, double cos_t, double sin_t, KPoint& out) {
  out.kx = cos_t * p.kx - sin_t * p.ky;
  out.ky = sin_t * p.kx + cos_t * p.ky;
}

}  // namespace

KCoords rotate_coords(const phantom::SampledTrajectory& traj, const motion::MotionTrajectory& mot) {
  check_pair(traj, mot);
  KCoords out(traj.coords.size());
  for (int tr = 0; tr < traj.num_trs(); ++tr) {
    const double th = deg_to_rad(mot.states[tr].theta_deg);
    const double c = std::cos(th);
    const double s = std::sin(th);
    const auto& range = traj.tr_bounds[tr];
    for (std::size_t j = range.begin; j < range.end; ++j) rotate_into(traj.coords[j], c, s, out[j]);
  }
  return out;
}

std::vector<Complex> translation_phase(const phantom::SampledTrajectory& traj, const motion::MotionTrajectory& mot,
                                       const KCoords& rotated) {
  check_pair(traj, mot);
  if (rotated.size() != traj.coords.size()) throw std::invalid_argument("translation_phase: rotated coords length mismatch");

  std::vector<Complex> out(rotated.size());
  for (int tr = 0; tr < traj.num_trs(); ++tr) {
    const double px = mot.states[tr].phi_x;
    const double py = mot.states[tr].phi_y;
    const auto& range = traj.tr_bounds[tr];
    for (std::size_t j = range.begin; j < range.end; ++j) {
      const double ph = -(rotated[j].kx * px + rotated[j].ky * py);
      out[j] = Complex(std::cos(ph), std::sin(ph));
    }
  }
  return out;
}

KSpaceData apply_forward(const ComplexImage& x, const phantom::CoilMaps& maps, const phantom::SampledTrajectory& traj,
                         const motion::MotionTrajectory& mot) {
  MotionForwardOperator op(maps, traj);
  op.set_image(x);
  KSpaceData y;
  y.num_coils = maps.num_coils;
  y.noise_std = 0.0;
  y.samples.resize(op.total_samples());
  op.forward(mot, y.samples);
  return y;
}

ComplexImage apply_adjoint(const KSpaceData& y, const phantom::CoilMaps& maps, const phantom::SampledTrajectory& traj,
                           const motion::MotionTrajectory& mot) {
  if (y.num_coils != maps.num_coils) throw std::invalid_argument("apply_adjoint: coil count mismatch");
  if (y.samples.size() != traj.coords.size() * maps.num_coils) throw std::invalid_argument("apply_adjoint: sample count mismatch");
  MotionForwardOperator op(maps, traj);
  return op.adjoint(y.samples, mot);
}

KSpaceData add_noise(const KSpaceData& y, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be >= 0");
  KSpaceData out = y;
  out.noise_std = sigma;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  const double per_component = sigma / std::sqrt(2.0);
  for (auto& s : out.samples) s += rng.complex_gaussian(per_component);
  return out;
}

MotionForwardOperator::MotionForwardOperator(const phantom::CoilMaps& maps, const phantom::SampledTrajectory& traj)
    : maps_(maps), traj_(traj), nufft_(traj.grid_n) {
  check_maps(maps_, traj_.grid_n);
  if (traj_.coords.empty() || traj_.tr_bounds.empty()) throw std::invalid_argument("trajectory is empty");
}

void MotionForwardOperator::set_image(const ComplexImage& x) {
  if (!x.square() || x.width != traj_.grid_n) throw std::invalid_argument("set_image: image grid does not match trajectory grid");
  coil_spectra_.clear();
  coil_spectra_.reserve(maps_.num_coils);
  ComplexImage weighted(x.width, x.height);
  for (int c = 0; c < maps_.num_coils; ++c) {
    const auto& m = maps_.maps[c];
    for (std::size_t i = 0; i < x.size(); ++i) weighted.data[i] = m.data[i] * x.data[i];
    coil_spectra_.push_back(nufft_.prepare(weighted));
  }
  image_set_ = true;
}

std::size_t MotionForwardOperator::tr_length(int tr) const {
  const auto& r = traj_.tr_bounds.at(tr);
  return r.end - r.begin;
}

void MotionForwardOperator::rotated_tr_coords(const motion::MotionState& state, int tr, KCoords& out) const {
  const double th = deg_to_rad(state.theta_deg);
  const double c = std::cos(th);
  const double s = std::sin(th);
  const auto& range = traj_.tr_bounds[tr];
  out.resize(range.end - range.begin);
  for (std::size_t j = range.begin; j < range.end; ++j) rotate_into(traj_.coords[j], c, s, out[j - range.begin]);
}

void MotionForwardOperator::forward_tr(const motion::MotionState& state, int tr, std::span<Complex> out) const {
  if (!image_set_) throw std::runtime_error("forward_tr: set_image has not been called");
  KCoords rot;
  rotated_tr_coords(state, tr, rot);
  const std::size_t len = rot.size();
  if (out.size() != len * maps_.num_coils) throw std::invalid_argument("forward_tr: output size mismatch");

  std::vector<Complex> phase(len);
  for (std::size_t j = 0; j < len; ++j) {
    const double ph = -(rot[j].kx * state.phi_x + rot[j].ky * state.phi_y);
    phase[j] = Complex(std::cos(ph), std::sin(ph));
  }
  for (int c = 0; c < maps_.num_coils; ++c) {
    auto block = out.subspan(static_cast<std::size_t>(c) * len, len);
    nufft_.sample(coil_spectra_[c], rot, block);
    for (std::size_t j = 0; j < len; ++j) block[j] *= phase[j];
  }
}

void MotionForwardOperator::forward(const motion::MotionTrajectory& mot, std::span<Complex> out) const {
  if (!image_set_) throw std::runtime_error("forward: set_image has not been called");
  check_pair(traj_, mot);
  const std::size_t m = traj_.coords.size();
  if (out.size() != m * maps_.num_coils) throw std::invalid_argument("forward: output size mismatch");

  const KCoords rot = rotate_coords(traj_, mot);
  const auto phase = translation_phase(traj_, mot, rot);
  for (int c = 0; c < maps_.num_coils; ++c) {
    auto block = out.subspan(static_cast<std::size_t>(c) * m, m);
    nufft_.sample(coil_spectra_[c], rot, block);
    for (std::size_t j = 0; j < m; ++j) block[j] *= phase[j];
  }
}

ComplexImage MotionForwardOperator::adjoint(std::span<const Complex> samples, const motion::MotionTrajectory& mot) const {
  check_pair(traj_, mot);
  const std::size_t m = traj_.coords.size();
  if (samples.size() != m * maps_.num_coils) throw std::invalid_argument("adjoint: sample count mismatch");

  const KCoords rot = rotate_coords(traj_, mot);
  const auto phase = translation_phase(traj_, mot, rot);

  ComplexImage out(traj_.grid_n, traj_.grid_n);
  std::vector<Complex> dephased(m);
  for (int c = 0; c < maps_.num_coils; ++c) {
    const auto block = samples.subspan(static_cast<std::size_t>(c) * m, m);
    for (std::size_t j = 0; j < m; ++j) dephased[j] = block[j] * std::conj(phase[j]);
    auto acc = nufft_.make_accumulator();
    nufft_.scatter(acc, rot, dephased);
    const ComplexImage coil_img = nufft_.finish_adjoint(acc);
    const auto& map = maps_.maps[c];
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += std::conj(map.data[i]) * coil_img.data[i];
  }
  return out;
}

}  // namespace mrmoco::acquisition
