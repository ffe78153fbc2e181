#ifndef MRMOCO_FFT_INTERNAL_HPP
#define MRMOCO_FFT_INTERNAL_HPP

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "mrmoco/types.hpp"

namespace mrmoco::detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place unnormalized 2D DFT in raw (unshifted) index order.
// sign = FFTW_FORWARD (-1) or FFTW_BACKWARD (+1). Planning is serialized;
// FFTW_ESTIMATE does not touch the buffers.
inline void fft2d_inplace(std::vector<Complex>& a, int rows, int cols, int sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_2d(rows, cols, ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace mrmoco::detail

#endif
