#ifndef MRMOCO_RNG_HPP
#define MRMOCO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "mrmoco/types.hpp"

namespace mrmoco {

// Deterministic RNG built on the standardized mt19937_64 bit stream. The
// distribution shaping (uniform, Box-Muller normal) is done by hand because
// std::uniform_real_distribution and std::normal_distribution are
// implementation-defined and would break bit-reproducibility of seeded runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // [0, 1) with 53 bits of mantissa.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = u01();
    while (u1 <= 0.0) u1 = u01();
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  Complex complex_gaussian(double std_per_component) {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re * std_per_component, im * std_per_component);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mrmoco

#endif
