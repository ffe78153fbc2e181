#ifndef MRMOCO_PRIOR_HPP
#define MRMOCO_PRIOR_HPP

#include <filesystem>
#include <memory>
#include <vector>

#include "mrmoco/types.hpp"

namespace mrmoco::prior {

// Annealing schedule: strictly decreasing, geometrically spaced smoothing
// levels with per-level Langevin step eta_i = base_step * (sigma_i/sigma_L)^2.
struct NoiseSchedule {
  std::vector<double> levels;
  int steps_per_level = 0;
  double base_step = 0.0;

  int num_levels() const { return static_cast<int>(levels.size()); }
  double step_size(int level) const {
    const double r = levels.at(level) / levels.back();
    return base_step * r * r;
  }
};

NoiseSchedule geometric_schedule(double sigma_max, double sigma_min, int num_levels, int steps_per_level,
                                 double base_step);

// Score function f(x) ~ grad log p(x) at each smoothing level; complex images
// are treated as 2N^2-dimensional real vectors throughout.
class ScoreProvider {
 public:
  virtual ~ScoreProvider() = default;
  virtual ComplexImage score(const ComplexImage& x, int level_index) const = 0;
  virtual double level_sigma(int level_index) const = 0;
};

enum class GaussianBasis {
  kPixel,    // variance per pixel component
  kFourier,  // variance per orthonormal-DFT coefficient component
};

// Score of a sigma-smoothed Gaussian, componentwise -(x - mean)/(v + sigma^2)
// in the chosen diagonal basis. The analytic stand-in for a learned prior.
ComplexImage gaussian_score(const ComplexImage& mean, const std::vector<double>& variance_spectrum,
                            const ComplexImage& x, double sigma, GaussianBasis basis = GaussianBasis::kPixel);

class GaussianScoreProvider : public ScoreProvider {
 public:
  GaussianScoreProvider(ComplexImage mean, std::vector<double> variance_spectrum, std::vector<double> levels,
                        GaussianBasis basis = GaussianBasis::kPixel);

  ComplexImage score(const ComplexImage& x, int level_index) const override;
  double level_sigma(int level_index) const override { return levels_.at(level_index); }

 private:
  ComplexImage mean_;
  std::vector<double> variance_;
  std::vector<double> levels_;
  GaussianBasis basis_;
};

// A stack of 2D circular-convolution kernels applied in sequence to real and
// imaginary parts independently. Loaded from the versioned parameter file
// (see io docs); the in-repo instance is a plain smoothing kernel, not a
// trained network.
class ConvDenoiser {
 public:
  static ConvDenoiser load(const std::filesystem::path& file);
  static ConvDenoiser from_kernels(std::vector<std::pair<int, std::vector<double>>> kernels);

  ComplexImage apply(const ComplexImage& x) const;
  void save(const std::filesystem::path& file) const;

 private:
  // each layer: odd kernel side length and row-major taps
  std::vector<std::pair<int, std::vector<double>>> layers_;
};

// Tweedie-form score (D(x) - x)/sigma^2 for a loaded denoiser.
ComplexImage denoiser_score(const ConvDenoiser& denoiser, const ComplexImage& x, double sigma);

// The denoiser the repository ships for integration tests: one 3x3 binomial
// smoothing kernel.
ConvDenoiser shipped_smoothing_denoiser();

class DenoiserScoreProvider : public ScoreProvider {
 public:
  DenoiserScoreProvider(ConvDenoiser denoiser, std::vector<double> levels);

  ComplexImage score(const ComplexImage& x, int level_index) const override;
  double level_sigma(int level_index) const override { return levels_.at(level_index); }

 private:
  ConvDenoiser denoiser_;
  std::vector<double> levels_;
};

// Radial power-law variance spectrum v(k) = dc / (1 + (|k|/k0)^p) + floor for
// the Fourier-basis Gaussian prior, |k| in radians/pixel on the centered grid.
std::vector<double> power_law_spectrum(int n, double dc, double k0, double p, double floor_v);

// Power-law parameters fit to the radially averaged spectra of the synthetic
// phantom class at desk scale; coefficient power scales with grid area.
std::vector<double> default_image_spectrum(int n);

}  // namespace mrmoco::prior

#endif
