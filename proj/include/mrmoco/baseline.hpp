#ifndef MRMOCO_BASELINE_HPP
#define MRMOCO_BASELINE_HPP

#include <complex>
#include <vector>

#include "mrmoco/acquisition.hpp"
#include "mrmoco/phantom.hpp"
#include "mrmoco/types.hpp"

namespace mrmoco::baseline {

struct L1WaveletConfig {
  double lambda = 1e-3;  // relative weight; see l1_wavelet_reconstruct
  int max_iters = 600;
  int decomposition_levels = 4;
  double tol = 1e-6;  // relative iterate-change stopping threshold
};

// Orthonormal multi-level periodized Daubechies-4 coefficients of a (zero
// padded, if needed) square image. In-place quadrant layout: each level
// leaves the approximation band in the top-left quadrant of the previous one.
struct WaveletCoeffs {
  int padded_n = 0;
  int orig_n = 0;
  int levels = 0;
  std::vector<Complex> data;
};

WaveletCoeffs wavelet_forward(const ComplexImage& x, int levels);
ComplexImage wavelet_adjoint(const WaveletCoeffs& coeffs);

double soft_threshold(double value, double threshold);
Complex soft_threshold(Complex value, double threshold);

// FISTA (monotone, with adaptive restart) for
//   min_x 0.5 || y/N - A0 x / N ||^2 + lambda_abs ||W x||_1
// where A0 is the zero-motion forward model and the coarsest approximation
// band is never thresholded. lambda_abs = cfg.lambda * max detail-band
// magnitude of W applied to the adjoint reconstruction, so cfg.lambda is a
// data-independent relative weight. Step size comes from a power-iteration
// estimate of the normalized operator's Lipschitz constant.
ComplexImage l1_wavelet_reconstruct(const acquisition::KSpaceData& y, const phantom::CoilMaps& maps,
                                    const phantom::SampledTrajectory& traj, const L1WaveletConfig& cfg);

}  // namespace mrmoco::baseline

#endif
