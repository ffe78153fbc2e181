#ifndef MRMOCO_GRIDMATH_HPP
#define MRMOCO_GRIDMATH_HPP

#include <span>
#include <vector>

#include "mrmoco/types.hpp"

namespace mrmoco::gridmath {

// Non-uniform discrete Fourier transform between an N x N image and arbitrary
// 2D k-space coordinates, realized as Kaiser-Bessel gridding on a 2x
// oversampled FFT grid (kernel width 8, no density compensation).
//
// Conventions, fixed project-wide:
//   forward:  y_j = sum_n x_n * exp(-i k_j . r_n)
//   adjoint:  x_n = sum_j y_j * exp(+i k_j . r_n)
// with r_n integer pixel offsets from the grid center and k in radians per
// pixel. On exact Cartesian coordinates (2*pi/N spacing) the forward equals a
// centered FFT. The exponential sum is 2*pi-periodic in k, so coordinates
// outside [-pi, pi) (e.g. rotated trajectories) are evaluated correctly
// without any wrapping of the inputs.
//
// The transform is split into an image-dependent stage (prepare / finish) and
// a coordinate-dependent stage (sample / scatter) so that samplers probing
// many coordinate sets against one image pay the FFT cost once.
class Nufft {
 public:
  explicit Nufft(int grid_size);

  int grid_size() const { return n_; }
  int oversampled_size() const { return os_n_; }

  // Oversampled, deapodized, sign-folded spectrum of one image. Valid only
  // with the Nufft instance that produced it.
  struct Spectrum {
    int n = 0;
    int os_n = 0;
    std::vector<Complex> grid;  // row-major os_n x os_n, FFT index order
  };

  struct Accumulator {
    int os_n = 0;
    std::vector<Complex> grid;
  };

  // Precomputed interpolation taps for one coordinate set. Planning once and
  // reusing across coils amortizes the kernel evaluations.
  struct CoordPlan {
    std::size_t count = 0;
    std::vector<int> px, py;     // wrapped grid indices, kKernelTaps per coord
    std::vector<double> wx, wy;  // kernel weights, kKernelTaps per coord
  };

  Spectrum prepare(const ComplexImage& image) const;
  CoordPlan plan_coords(std::span<const KPoint> coords) const;
  void sample_planned(const Spectrum& spec, const CoordPlan& plan, std::span<Complex> out) const;
  void sample(const Spectrum& spec, std::span<const KPoint> coords, std::span<Complex> out) const;

  Accumulator make_accumulator() const;
  void scatter_planned(Accumulator& acc, const CoordPlan& plan, std::span<const Complex> samples) const;
  void scatter(Accumulator& acc, std::span<const KPoint> coords, std::span<const Complex> samples) const;
  ComplexImage finish_adjoint(const Accumulator& acc) const;

  static constexpr int kKernelWidth = 8;
  // Symmetric tap window covering the closed support [-W/2, W/2]; the extra
  // tap keeps the sampled kernel symmetric, which the exact-on-grid discrete
  // deapodization relies on.
  static constexpr int kKernelTaps = kKernelWidth + 1;
  static constexpr double kOversampling = 2.0;

 private:
  double kernel(double t) const;  // interpolation kernel at |t| <= W/2

  int n_;
  int os_n_;
  double beta_;
  std::vector<double> kernel_table_;
  double table_step_inv_ = 0.0;
  std::vector<double> deapod_;  // per-axis inverse sampled-kernel DFT, length n_
};

// One-shot wrappers (the spec-level operations).
std::vector<Complex> nufft_forward(const ComplexImage& image, const KCoords& coords);
ComplexImage nufft_adjoint(const std::vector<Complex>& samples, const KCoords& coords, int grid_size);

// Exact O(M N^2) exponential sum, for verification only. Guarded to small
// grids so an accidental production call cannot blow up.
std::vector<Complex> dft_oracle_forward(const ComplexImage& image, const KCoords& coords);

// Unnormalized centered 2D FFT helpers shared by prior and metrics:
// sign = -1 computes X_m = sum_n x_n exp(-i 2*pi m.n / N) on centered indices.
void centered_fft(ComplexImage& image, int sign);

}  // namespace mrmoco::gridmath

#endif
