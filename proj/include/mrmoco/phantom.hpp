#ifndef MRMOCO_PHANTOM_HPP
#define MRMOCO_PHANTOM_HPP

#include <cstdint>
#include <vector>

#include "mrmoco/types.hpp"

namespace mrmoco::phantom {

// C coil sensitivity maps on the same grid as the target image,
// root-sum-of-squares normalized.
struct CoilMaps {
  int num_coils = 0;
  std::vector<ComplexImage> maps;
};

struct TrRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open
};

// Cartesian echo-train sampling: coords grouped contiguously by TR, each TR
// holding etl full frequency-encode lines. group count * etl * accel = n.
struct SampledTrajectory {
  KCoords coords;
  std::vector<TrRange> tr_bounds;
  int etl = 0;
  double accel = 1.0;
  int grid_n = 0;

  int num_trs() const { return static_cast<int>(tr_bounds.size()); }
};

// Modified Shepp-Logan phantom with a seeded smooth synthetic phase map
// (low-order polynomial). Magnitude follows the canonical ellipse table,
// normalized into [0, 1].
ComplexImage shepp_logan(int n, std::uint64_t phase_seed);

// Canonical modified Shepp-Logan ellipse sum at normalized coordinates
// (u, v) in [-1, 1]^2; exposed so tests can probe the table directly.
double shepp_logan_value(double u, double v);

// Simulated birdcage coil sensitivities, RSS-normalized.
CoilMaps birdcage_maps(int n, int num_coils);

// Equispaced sub-sampled Cartesian trajectory with interleaved line-to-TR
// assignment (selected line j goes to TR j mod num_trs).
SampledTrajectory cartesian_trajectory(int n, int etl, double accel);

}  // namespace mrmoco::phantom

#endif
