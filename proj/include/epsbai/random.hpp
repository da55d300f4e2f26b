#pragma once

#include <cstdint>
#include <random>

namespace epsbai {

// splitmix64 finalizer, used to derive independent sub-stream seeds
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Inverse standard normal CDF, Wichura's AS241 (PPND16), about 1e-16 relative.
double normal_quantile(double p);

// mt19937_64 plus the few distributions the library needs. All of them are
// written out here (not std:: distributions) so draws do not depend on the
// standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  // uniform on the open interval (0, 1)
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  // inverse-CDF sampling through AS241
  double normal() { return normal_quantile(uniform()); }
  // Marsaglia-Tsang, with the u^(1/a) boost for shape < 1
  double gamma(double shape);

 private:
  std::mt19937_64 engine_;
};

}  // namespace epsbai
