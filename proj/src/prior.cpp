#include "mrmoco/prior.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "mrmoco/gridmath.hpp"

namespace mrmoco::prior {

NoiseSchedule geometric_schedule(double sigma_max, double sigma_min, int num_levels, int steps_per_level,
                                 double base_step) {
  if (!(sigma_max > sigma_min) || !(sigma_min > 0.0)) throw std::invalid_argument("geometric_schedule: need sigma_max > sigma_min > 0");
  if (num_levels < 2) throw std::invalid_argument("geometric_schedule: need at least 2 levels");
  if (steps_per_level < 1 || base_step <= 0.0) throw std::invalid_argument("geometric_schedule: invalid step parameters");

  NoiseSchedule sched;
  sched.steps_per_level = steps_per_level;
  sched.base_step = base_step;
  sched.levels.resize(num_levels);
  const double ratio = std::pow(sigma_min / sigma_max, 1.0 / (num_levels - 1));
  double v = sigma_max;
  for (int i = 0; i < num_levels; ++i) {
    sched.levels[i] = v;
    v *= ratio;
  }
  sched.levels.back() = sigma_min;
  return sched;
}

ComplexImage gaussian_score(const ComplexImage& mean, const std::vector<double>& variance_spectrum,
                            const ComplexImage& x, double sigma, GaussianBasis basis) {
  if (mean.width != x.width || mean.height != x.height) throw std::invalid_argument("gaussian_score: mean/x shape mismatch");
  if (variance_spectrum.size() != x.size()) throw std::invalid_argument("gaussian_score: variance length mismatch");
  for (double v : variance_spectrum) {
    if (!(v > 0.0)) throw std::invalid_argument("gaussian_score: variance must be positive");
  }

  const double s2 = sigma * sigma;
  ComplexImage out(x.width, x.height);

  if (basis == GaussianBasis::kPixel) {
    for (std::size_t i = 0; i < x.size(); ++i) out.data[i] = -(x.data[i] - mean.data[i]) / (variance_spectrum[i] + s2);
    return out;
  }

  // Fourier basis: -U^H diag(1/(v+s^2)) U (x - mean) with U the orthonormal
  // centered DFT; smoothing adds s^2 to every eigenvalue because white noise
  // stays white under a unitary transform.
  const double n = x.width;
  for (std::size_t i = 0; i < x.size(); ++i) out.data[i] = x.data[i] - mean.data[i];
  gridmath::centered_fft(out, -1);
  for (std::size_t i = 0; i < x.size(); ++i) out.data[i] *= -1.0 / ((variance_spectrum[i] + s2) * n * n);
  gridmath::centered_fft(out, +1);
  return out;
}

GaussianScoreProvider::GaussianScoreProvider(ComplexImage mean, std::vector<double> variance_spectrum,
                                             std::vector<double> levels, GaussianBasis basis)
    : mean_(std::move(mean)), variance_(std::move(variance_spectrum)), levels_(std::move(levels)), basis_(basis) {
  if (variance_.size() != mean_.size()) throw std::invalid_argument("GaussianScoreProvider: variance length mismatch");
}

ComplexImage GaussianScoreProvider::score(const ComplexImage& x, int level_index) const {
  return gaussian_score(mean_, variance_, x, levels_.at(level_index), basis_);
}

namespace {
constexpr char kDenoiserMagic[8] = {'M', 'R', 'D', 'N', 'Z', 'R', '0', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}
}  // namespace

ConvDenoiser ConvDenoiser::from_kernels(std::vector<std::pair<int, std::vector<double>>> kernels) {
  ConvDenoiser d;
  for (const auto& [side, taps] : kernels) {
    if (side < 1 || side % 2 == 0) throw std::invalid_argument("ConvDenoiser: kernel side must be odd");
    if (taps.size() != static_cast<std::size_t>(side) * side) throw std::invalid_argument("ConvDenoiser: tap count mismatch");
  }
  d.layers_ = std::move(kernels);
  return d;
}

void ConvDenoiser::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("ConvDenoiser: cannot open for writing: " + file.string());
  out.write(kDenoiserMagic, 8);
  write_u32(out, 1);
  write_u32(out, static_cast<std::uint32_t>(layers_.size()));
  for (const auto& [side, taps] : layers_) {
    write_u32(out, static_cast<std::uint32_t>(side));
    for (double t : taps) write_f64(out, t);
  }
  if (!out) throw std::runtime_error("ConvDenoiser: write failed: " + file.string());
}

ConvDenoiser ConvDenoiser::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("ConvDenoiser: cannot open: " + file.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kDenoiserMagic, 8) != 0) throw std::runtime_error("ConvDenoiser: bad magic in " + file.string());
  const auto version = read_u32(in);
  if (version != 1) throw std::runtime_error("ConvDenoiser: unsupported version");
  const auto count = read_u32(in);
  if (count > 64) throw std::runtime_error("ConvDenoiser: implausible layer count");

  std::vector<std::pair<int, std::vector<double>>> layers;
  layers.reserve(count);
  for (std::uint32_t l = 0; l < count; ++l) {
    const auto side = read_u32(in);
    if (side < 1 || side % 2 == 0 || side > 255) throw std::runtime_error("ConvDenoiser: bad kernel side");
    std::vector<double> taps(static_cast<std::size_t>(side) * side);
    for (auto& t : taps) t = read_f64(in);
    if (!in) throw std::runtime_error("ConvDenoiser: truncated file");
    layers.emplace_back(static_cast<int>(side), std::move(taps));
  }
  return from_kernels(std::move(layers));
}

ComplexImage ConvDenoiser::apply(const ComplexImage& x) const {
  if (!x.square()) throw std::invalid_argument("ConvDenoiser: image must be square");
  const int n = x.width;
  ComplexImage cur = x;
  ComplexImage next(n, n);
  for (const auto& [side, taps] : layers_) {
    const int half = side / 2;
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        Complex acc(0.0, 0.0);
        for (int dy = -half; dy <= half; ++dy) {
          const int sy = (iy + dy + n) % n;
          const double* krow = taps.data() + static_cast<std::size_t>(dy + half) * side;
          for (int dx = -half; dx <= half; ++dx) {
            const int sx = (ix + dx + n) % n;
            acc += krow[dx + half] * cur.at(sx, sy);
          }
        }
        next.at(ix, iy) = acc;
      }
    }
    std::swap(cur, next);
  }
  return cur;
}

ComplexImage denoiser_score(const ConvDenoiser& denoiser, const ComplexImage& x, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("denoiser_score: sigma must be positive");
  ComplexImage d = denoiser.apply(x);
  const double inv = 1.0 / (sigma * sigma);
  for (std::size_t i = 0; i < d.size(); ++i) d.data[i] = (d.data[i] - x.data[i]) * inv;
  return d;
}

ConvDenoiser shipped_smoothing_denoiser() {
  const double s = 1.0 / 16.0;
  return ConvDenoiser::from_kernels({{3, {s, 2 * s, s, 2 * s, 4 * s, 2 * s, s, 2 * s, s}}});
}

DenoiserScoreProvider::DenoiserScoreProvider(ConvDenoiser denoiser, std::vector<double> levels)
    : denoiser_(std::move(denoiser)), levels_(std::move(levels)) {}

ComplexImage DenoiserScoreProvider::score(const ComplexImage& x, int level_index) const {
  return denoiser_score(denoiser_, x, levels_.at(level_index));
}

std::vector<double> default_image_spectrum(int n) {
  const double area = static_cast<double>(n) * n / (64.0 * 64.0);
  return power_law_spectrum(n, 27.0 * area, 0.02, 1.675, 1.2e-3 * area);
}

std::vector<double> power_law_spectrum(int n, double dc, double k0, double p, double floor_v) {
  if (n < 2 || dc <= 0.0 || k0 <= 0.0 || floor_v <= 0.0) throw std::invalid_argument("power_law_spectrum: invalid parameters");
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  const int c = n / 2;
  const double dk = 2.0 * kPi / n;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double k = dk * std::sqrt(static_cast<double>((ix - c) * (ix - c) + (iy - c) * (iy - c)));
      v[static_cast<std::size_t>(iy) * n + ix] = dc / (1.0 + std::pow(k / k0, p)) + floor_v;
    }
  }
  return v;
}

}  // namespace mrmoco::prior
